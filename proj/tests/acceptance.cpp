// Acceptance suite: one PASS/FAIL line per criterion. `acceptance --only N` runs criterion N.

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace rankcut;
using namespace rankcut::testing;

namespace {

const std::string kFixtures = RANKCUT_FIXTURES;

struct Outcome {
    bool pass = false;
    std::string detail;
};

GraphSpec load_spec(const std::string& file) {
    const auto path = kFixtures + "/" + file;
    return parse_graph_spec(read_text_file(path), path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::size_t> range(std::size_t from, std::size_t to) {
    std::vector<std::size_t> out;
    for (auto i = from; i < to; ++i) out.push_back(i);
    return out;
}

// Two disjoint random sets of the given sizes over 0..n-1.
std::pair<NodeSet, NodeSet> disjoint_pair(std::size_t n, std::size_t ka, std::size_t kb, std::mt19937_64& rng) {
    auto all = range(0, n);
    std::shuffle(all.begin(), all.end(), rng);
    return {NodeSet(std::vector<std::size_t>(all.begin(), all.begin() + static_cast<long>(ka))),
            NodeSet(std::vector<std::size_t>(all.begin() + static_cast<long>(ka),
                                             all.begin() + static_cast<long>(ka + kb)))};
}

double signed_weight(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    const double w = mag(rng);
    return std::bernoulli_distribution(0.5)(rng) ? -w : w;
}

SelectionCondition random_condition(const Dag& g, std::size_t max_targets, const std::string& name,
                                    std::mt19937_64& rng) {
    SelectionCondition c;
    c.name = name;
    const auto size = std::uniform_int_distribution<std::size_t>(1, std::min(max_targets, g.size()))(rng);
    for (auto v : random_subset(g.size(), size, rng)) {
        c.targets.push_back(g.node(v).name);
        c.coeffs.push_back(signed_weight(rng));
    }
    return c;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

Outcome ac1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::size_t queries = 0, agree = 0;
    std::string first_miss;
    for (int m = 0; m < 200; ++m) {
        const auto n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
        const auto g = random_dag(n, 0.3, rng);
        for (int q = 0; q < 10; ++q) {
            const auto a = random_subset(n, std::uniform_int_distribution<std::size_t>(1, n)(rng), rng);
            const auto b = random_subset(n, std::uniform_int_distribution<std::size_t>(1, n)(rng), rng);
            const auto flow = min_tsep(g, a, b).cut_size;
            const auto brute = min_tsep_bruteforce(g, a, b, 2 * n).cut_size;
            ++queries;
            if (flow == brute) {
                ++agree;
            } else if (first_miss.empty()) {
                first_miss = " first mismatch in model " + std::to_string(m);
            }
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << agree << "/" << queries << " queries agree, " << secs << " s" << first_miss;
    return {agree == queries && secs < 30.0, os.str()};
}

const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> kSplits = {
    {{"X1", "X2"}, {"X3", "X4"}}, {{"X1", "X3"}, {"X2", "X4"}}, {{"X1", "X4"}, {"X2", "X3"}}};

std::vector<std::size_t> split_ranks(const GraphSpec& spec) {
    const auto aug = spec.augmented();
    std::vector<std::size_t> out;
    for (const auto& [a, b] : kSplits) {
        out.push_back(graphical_rank(aug, aug.graph.indices_of(a), aug.graph.indices_of(b)).rank);
    }
    return out;
}

std::string list(const std::vector<std::size_t>& xs) {
    std::vector<std::string> parts;
    for (auto x : xs) parts.push_back(std::to_string(x));
    return join(parts, ",");
}

Outcome ac2() {
    const auto ranks = split_ranks(load_spec("tetrad.json"));
    return {ranks == std::vector<std::size_t>{1, 1, 1}, "ranks " + list(ranks)};
}

Outcome ac3() {
    const auto path = kFixtures + "/inverse_tetrad.json";
    const auto spec = parse_graph_spec(read_text_file(path), path);
    const auto ranks = split_ranks(spec);
    const auto model = parse_model(read_text_file(path), path);
    // truncated-normal oracle values for the six pairs (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)
    const double expected[6] = {0.0589, -0.0883, 0.1178, 0.1767, -0.2356, 0.3534};
    const auto cov = mc_post_selection_covariance(model.sem, model.selection, 1000000, 2024);
    double worst = 0.0;
    int idx = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            worst = std::max(worst, std::abs(cov.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                             expected[idx++]));
        }
    }
    std::ostringstream os;
    os << "ranks " << list(ranks) << ", max covariance error " << worst;
    return {ranks == std::vector<std::size_t>{1, 1, 1} && worst <= 0.02, os.str()};
}

Outcome ac4() {
    const std::size_t a = 6, b = 6, l = 3, r = 3, c = 2, d = 1;
    const std::size_t ab[4] = {2 * c, 2 * c + d, 2 * c, c};
    const std::size_t cross[4] = {l + r + c, l + r + c, l + r, l + r + c};
    auto names = [](const std::string& g, std::size_t from, std::size_t to) {
        std::vector<std::string> out;
        for (std::size_t i = from; i <= to; ++i) out.push_back(g + std::to_string(i));
        return out;
    };
    auto cat = [](std::vector<std::string> x, const std::vector<std::string>& y) {
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
    const auto a1 = names("A", 1, a / 2), a2 = names("A", a / 2 + 1, a);
    const auto b1 = names("B", 1, b / 2), b2 = names("B", b / 2 + 1, b);
    std::size_t ok = 0;
    std::vector<std::string> misses;
    for (int col = 1; col <= 4; ++col) {
        const auto aug = load_spec("spider_" + std::to_string(col) + ".json").augmented();
        auto rank = [&](const std::vector<std::string>& x, const std::vector<std::string>& y) {
            return graphical_rank(aug, aug.graph.indices_of(x), aug.graph.indices_of(y)).rank;
        };
        const auto i = static_cast<std::size_t>(col - 1);
        const std::vector<std::tuple<std::string, std::size_t, std::size_t>> cells = {
            {"A1|A2", l + c, rank(a1, a2)},
            {"B1|B2", r + c, rank(b1, b2)},
            {"A|B", ab[i], rank(names("A", 1, a), names("B", 1, b))},
            {"A1B1|A2B2", cross[i], rank(cat(a1, b1), cat(a2, b2))},
        };
        for (const auto& [row, want, got] : cells) {
            if (want == got) {
                ++ok;
            } else {
                misses.push_back("col" + std::to_string(col) + " " + row + " want " + std::to_string(want) + " got " +
                                 std::to_string(got));
            }
        }
    }
    std::string detail = std::to_string(ok) + "/16 cells";
    if (!misses.empty()) detail += "; " + join(misses, "; ");
    return {ok == 16, detail};
}

Outcome ac5() {
    std::mt19937_64 rng(505);
    int good = 0;
    for (int m = 0; m < 100; ++m) {
        const auto n = std::uniform_int_distribution<std::size_t>(4, 10)(rng);
        const auto g = random_dag(n, 0.3, rng, true);
        const auto k = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
        SelectionConfig cfg;
        for (std::size_t s = 0; s < k; ++s) {
            auto c = random_condition(g, 3, "S" + std::to_string(s + 1), rng);
            c.noise = NoiseSpec::gaussian(std::uniform_real_distribution<double>(0.5, 2.0)(rng));
            c.admissible = AdmissibleSet::point(0.3);
            cfg.conditions.push_back(c);
        }
        const LinearSem sem(g);
        const auto joint = joint_covariance_with_responses(sem, cfg);
        const auto cond = pointwise_conditional_covariance(joint, range(0, n), range(n, n + k));
        const auto aug = augment(g, cfg);
        const double scale = cond.values.cwiseAbs().maxCoeff();
        bool all = true;
        for (int q = 0; q < 5; ++q) {
            const auto ka = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, n - 1))(rng);
            const auto kb = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, n - ka))(rng);
            const auto [qa, qb] = disjoint_pair(n, ka, kb, rng);
            const auto block = detail::submatrix(cond.values, qa.items(), qb.items());
            all = all && svd_rank(block, 1e-8, scale) == graphical_rank(aug, qa, qb).rank;
        }
        good += all ? 1 : 0;
    }
    return {good >= 95, std::to_string(good) + "/100 models agree on every query"};
}

Outcome ac6() {
    std::mt19937_64 rng(606);
    int pairs = 0, agree = 0;
    for (int m = 0; m < 40; ++m) {
        const auto n = std::uniform_int_distribution<std::size_t>(5, 8)(rng);
        const auto g = random_dag(n, 0.3, rng, true);
        const LinearSem sem(g);
        const bool logistic = m % 2 == 1;
        const auto k = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
        SelectionConfig cfg;
        for (std::size_t s = 0; s < k; ++s) {
            auto c = random_condition(g, 3, "S" + std::to_string(s + 1), rng);
            c.noise = logistic ? NoiseSpec::logistic(1.0) : NoiseSpec::gaussian(1.0);
            c.admissible = AdmissibleSet::open_interval(-1.0, 1.0);
            cfg.conditions.push_back(c);
        }
        // window between the 30th and 70th percentile of each response
        const auto draws = draw_joint(sem, cfg, 20000, 7000 + static_cast<std::uint64_t>(m));
        for (std::size_t s = 0; s < k; ++s) {
            const auto col = draws.values.col(static_cast<Eigen::Index>(n + s));
            std::vector<double> y(col.data(), col.data() + col.size());
            std::sort(y.begin(), y.end());
            cfg.conditions[s].admissible =
                AdmissibleSet::open_interval(y[y.size() * 3 / 10], y[y.size() * 7 / 10]);
        }
        const auto data = sample(sem, cfg, 100000, 8000 + static_cast<std::uint64_t>(m));
        const auto aug = augment(g, cfg);
        for (int q = 0; q < 3; ++q) {
            const auto ka = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
            const auto kb = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, n - ka))(rng);
            const auto [qa, qb] = disjoint_pair(n, ka, kb, rng);
            ++pairs;
            agree += cca_rank(data, qa.items(), qb.items(), 0.01).rank == graphical_rank(aug, qa, qb).rank ? 1 : 0;
        }
    }
    std::ostringstream os;
    os << agree << "/" << pairs << " (model, query) pairs agree";
    return {agree * 100 >= 85 * pairs, os.str()};
}

Outcome ac7() {
    std::mt19937_64 rng(707);
    RankTestSpec exact;
    exact.method = RankMethod::SingularValueThreshold;
    exact.rel_tol = 1e-6;
    int good = 0;
    std::size_t triples = 0;
    for (int m = 0; m < 50; ++m) {
        const auto nl = std::uniform_int_distribution<std::size_t>(3, 5)(rng);
        const auto latent_dag = random_dag(nl, 0.5, rng, true);
        DagBuilder builder;
        for (std::size_t i = 0; i < nl; ++i) builder.node("L" + std::to_string(i), NodeRole::Latent);
        for (const auto& e : latent_dag.edges()) {
            builder.edge("L" + std::to_string(e.parent), "L" + std::to_string(e.child), e.weight);
        }
        std::vector<MeasurementClustering::Entry> entries;
        for (std::size_t i = 0; i < nl; ++i) {
            MeasurementClustering::Entry entry{"L" + std::to_string(i), {}};
            const auto count = std::uniform_int_distribution<int>(2, 3)(rng);
            for (int j = 0; j < count; ++j) {
                const auto name = "M" + std::to_string(i) + "_" + std::to_string(j);
                builder.node(name).edge(entry.latent, name, signed_weight(rng));
                entry.measurements.push_back(name);
            }
            entries.push_back(entry);
        }
        const auto g = builder.build();
        SelectionCondition c;
        c.name = "S";
        for (auto v : random_subset(nl, std::min<std::size_t>(2, nl), rng)) {
            c.targets.push_back("L" + std::to_string(v));
            c.coeffs.push_back(signed_weight(rng));
        }
        c.noise = NoiseSpec::gaussian(1.0);
        c.admissible = m % 2 == 0 ? AdmissibleSet::point(0.3) : AdmissibleSet::open_interval(-0.5, 0.5);
        const SelectionConfig cfg{{c}};
        const MeasurementClustering clustering(entries);
        const auto cov = gaussian_post_selection_covariance(LinearSem(g), cfg);
        const auto aug = augment(g, cfg);
        std::vector<std::size_t> vars;
        for (const auto& l : clustering.latents()) vars.push_back(aug.graph.index_of(l));
        const auto rank = rank_ci_oracle(cov, clustering, exact);
        const auto truth = dsep_ci_oracle(aug, vars);
        bool all = true;
        for (std::size_t i = 0; i < nl; ++i) {
            for (std::size_t j = i + 1; j < nl; ++j) {
                for (std::size_t mask = 0; mask < (std::size_t{1} << nl); ++mask) {
                    if (mask >> i & 1 || mask >> j & 1 || std::popcount(mask) > 2) continue;
                    NodeSet cs;
                    for (std::size_t v = 0; v < nl; ++v) {
                        if (mask >> v & 1) cs.insert(v);
                    }
                    ++triples;
                    all = all && rank(NodeSet{i}, NodeSet{j}, cs).independent ==
                                     truth(NodeSet{i}, NodeSet{j}, cs).independent;
                }
            }
        }
        good += all ? 1 : 0;
    }
    std::ostringstream os;
    os << good << "/50 models agree on all " << triples << " triples";
    return {good >= 48, os.str()};
}

Outcome ac8() {
    const std::vector<std::string> xs = {"X1", "X2", "X3", "X4"};
    const auto left = truth_pag(load_spec("confounded_colliders.json").augmented(), xs).pag;
    const auto right = truth_pag(load_spec("selected_chains.json").augmented(), xs).pag;
    const auto x3 = left.index_of("X3"), x4 = left.index_of("X4");
    const bool bidirected = left.mark(x3, x4) == Mark::Arrow && left.mark(x4, x3) == Mark::Arrow;
    bool all_tails = right.edge_count() > 0;
    for (std::size_t i = 0; i < right.size(); ++i) {
        for (std::size_t j = 0; j < right.size(); ++j) {
            if (right.adjacent(i, j) && right.mark(i, j) != Mark::Tail) all_tails = false;
        }
    }
    const bool chains = right.mark(right.index_of("X1"), right.index_of("X2")) == Mark::Tail &&
                        right.mark(right.index_of("X2"), right.index_of("X1")) == Mark::Tail &&
                        right.mark(right.index_of("X3"), right.index_of("X4")) == Mark::Tail &&
                        right.mark(right.index_of("X4"), right.index_of("X3")) == Mark::Tail;
    auto flat = [](std::string s) {
        std::replace(s.begin(), s.end(), '\n', ';');
        return s;
    };
    return {bidirected && all_tails && chains,
            "left [" + flat(left.to_text()) + "] right [" + flat(right.to_text()) + "]"};
}

Outcome ac9() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto path = kFixtures + "/experiment_small.json";
    const auto cfg = parse_experiment_config(read_text_file(path), path);
    const auto rep = run_experiment(cfg);
    const double secs = seconds_since(t0);
    const auto ours = summarize(rep, "rank_fci");
    const auto base = summarize(rep, "representative_fci");
    std::ostringstream os;
    os << "edge_mark_diff rank " << ours.mean_edge_mark_diff << " (" << ours.runs << " runs) vs baseline "
       << base.mean_edge_mark_diff << " (" << base.runs << " runs), " << secs << " s";
    const bool complete = ours.runs == cfg.seeds.size() && base.runs == cfg.seeds.size();
    return {complete && ours.mean_edge_mark_diff <= base.mean_edge_mark_diff && secs < 120.0, os.str()};
}

int run(const std::string& cmd) {
    return std::system((cmd + " > /dev/null 2>&1").c_str());
}

Outcome ac10() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / ("rankcut_ac10_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::string cli = RANKCUT_CLI;
    std::vector<std::string> runs;
    for (int i = 0; i < 2; ++i) {
        const auto dir = root / ("run" + std::to_string(i));
        fs::create_directories(dir);
        const int sim = run(cli + " simulate --model " + kFixtures + "/inverse_tetrad.json --n 5000 --seed 11 --out " +
                            (dir / "sim.csv").string());
        const int ev = run(cli + " eval --config " + kFixtures + "/experiment_small.json --seeds 3,1 --out " +
                           (dir / "eval").string());
        if (sim != 0 || ev != 0) {
            fs::remove_all(root);
            return {false, "cli exited with status " + std::to_string(sim) + "/" + std::to_string(ev)};
        }
        runs.push_back(read_text_file((dir / "sim.csv").string()) + "\x1f" +
                       read_text_file((dir / "eval" / "report.json").string()) + "\x1f" +
                       read_text_file((dir / "eval" / "summary.csv").string()));
    }
    fs::remove_all(root);
    const bool same = runs[0] == runs[1];
    return {same, same ? "simulate and eval outputs identical (" + std::to_string(runs[0].size()) + " bytes)"
                       : "outputs differ between runs"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"min t-separation matches brute force", ac1},
        {"tetrad graphical ranks", ac2},
        {"inverse tetrad ranks and covariances", ac3},
        {"spider rank table", ac4},
        {"pointwise selection rank identity", ac5},
        {"interval selection sample ranks", ac6},
        {"latent rank CI matches d-separation", ac7},
        {"confounding and selection PAG marks", ac8},
        {"rank FCI versus representative baseline", ac9},
        {"CLI determinism", ac10},
    };
    std::size_t only = 0;
    if (argc == 3 && std::string(argv[1]) == "--only") only = std::stoul(argv[2]);
    if (only > criteria.size() || (argc != 1 && argc != 3)) {
        std::cerr << "usage: acceptance [--only N]\n";
        return 2;
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && only != i + 1) continue;
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += out.pass ? 0 : 1;
        std::cout << "AC" << i + 1 << " " << (out.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
                  << out.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
