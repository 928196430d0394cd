#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankcut/rankcut.hpp"

using namespace rankcut;

namespace {

struct Options {
    std::string model, graph, data, clustering, config, out;
    std::vector<std::string> a, b, c, d, vars;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string method = "cca";
    double alpha = 0.05;
    double rel_tol = 0.05;
    int max_cond = -1;
    bool all_columns = false;
    bool dry_run = false;
    bool timing = false;
    std::vector<std::uint64_t> seeds;
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

std::string names(const Dag& g, const NodeSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + g.node(s[i]).name;
    return out + "}";
}

RankTestSpec rank_spec(const Options& o) {
    RankTestSpec s;
    s.method = parse_rank_method(o.method);
    s.alpha = o.alpha;
    s.rel_tol = o.rel_tol;
    s.validate();
    return s;
}

int run_simulate(const Options& o) {
    if (o.n < 1) throw InputError("--n must be at least 1");
    const auto model = parse_model(read_text_file(o.model), o.model);
    SampleStats stats;
    auto data = sample(model.sem, model.selection, o.n, o.seed, {}, &stats);
    if (!o.all_columns) {
        std::vector<std::size_t> keep;
        for (std::size_t j = 0; j < model.sem.size(); ++j) {
            if (model.sem.graph().node(j).role == NodeRole::Observed) keep.push_back(j);
        }
        data = data.select(keep);
    }
    emit(o.out, dataset_to_csv(data));
    if (!o.out.empty() && o.out != "-") {
        Json j = {{"rows", o.n}, {"columns", data.labels}, {"proposals", stats.proposals},
                  {"acceptance_rate", stats.acceptance_rate()}, {"out", o.out}};
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

int run_grank(const Options& o) {
    const auto spec = parse_graph_spec(read_text_file(o.model), o.model);
    const auto aug = spec.augmented();
    const auto r = graphical_rank(aug, aug.graph.indices_of(o.a), aug.graph.indices_of(o.b));
    Json j = {{"a", o.a}, {"b", o.b}, {"rank", r.rank}, {"cut_size", r.cut_size},
              {"selection_count", r.selection_count}, {"c", aug.graph.names_of(r.cut_c)},
              {"d", aug.graph.names_of(r.cut_d)}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_tsep(const Options& o) {
    const auto spec = parse_graph_spec(read_text_file(o.graph), o.graph);
    const auto aug = spec.augmented();
    const auto& g = aug.graph;
    const auto a = g.indices_of(o.a), b = g.indices_of(o.b);
    if (!o.c.empty() || !o.d.empty()) {
        const bool sep = t_separates(g, a, b, g.indices_of(o.c), g.indices_of(o.d));
        std::cout << "t-separated: " << (sep ? "true" : "false") << "\n";
        return 0;
    }
    const auto r = min_tsep(g, a, b);
    std::cout << "minimum |C| + |D|: " << r.cut_size << "\n"
              << "C: " << names(g, r.cut_c) << "\n"
              << "D: " << names(g, r.cut_d) << "\n";
    return 0;
}

int run_ranks(const Options& o) {
    const auto data = parse_csv(read_text_file(o.data), o.data);
    const auto cov = sample_covariance(data);
    const auto d = estimate_rank(cov, cov.indices_of(o.a), cov.indices_of(o.b), rank_spec(o));
    std::cout << rank_decision_to_json(o.a, o.b, d).dump(2) << "\n";
    return 0;
}

int run_discover(const Options& o) {
    const auto data = parse_csv(read_text_file(o.data), o.data);
    const auto clustering = parse_clustering(read_text_file(o.clustering), o.clustering);
    FciOptions fo;
    fo.max_cond_size = o.max_cond;
    const auto out = discover_latent_pag(sample_covariance(data), clustering, rank_spec(o), fo);
    for (const auto& n : out.notes) std::cerr << "note: " << n << "\n";
    if (!o.out.empty()) write_text_file(o.out, pag_to_json(out.pag).dump(2) + "\n");
    std::cout << out.pag.to_text();
    return 0;
}

int run_truth(const Options& o) {
    const auto spec = parse_graph_spec(read_text_file(o.model), o.model);
    std::vector<std::string> vars = o.vars;
    if (vars.empty()) {
        if (spec.clustering) {
            vars = spec.clustering->latents();
        } else {
            for (const auto& n : spec.graph.nodes()) {
                if (n.role == NodeRole::Observed) vars.push_back(n.name);
            }
        }
    }
    FciOptions fo;
    fo.max_cond_size = o.max_cond;
    const auto out = truth_pag(spec.augmented(), vars, fo);
    if (!o.out.empty()) write_text_file(o.out, pag_to_json(out.pag).dump(2) + "\n");
    std::cout << out.pag.to_text();
    return 0;
}

int run_eval(const Options& o) {
    const auto text = read_text_file(o.config);
    auto cfg = parse_experiment_config(text, o.config);
    if (!o.seeds.empty()) {
        cfg.seeds = o.seeds;
    } else if (!Json::parse(text).contains("seeds")) {
        throw InputError("eval needs seeds: list them in the config or pass --seeds");
    }
    if (o.dry_run) cfg.sample_size = 0;
    if (o.timing) cfg.record_timing = true;
    const auto rep = run_experiment(cfg);
    write_report(rep, o.out);
    const auto j = report_to_json(rep);
    std::cout << Json{{"out", o.out}, {"seeds", rep.seeds.size()}, {"summary", j["summary"]}}.dump(2) << "\n";
    for (const auto& s : rep.seeds) {
        if (!s.error.empty()) std::cerr << "seed " << s.seed << ": " << s.error << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rankcut: rank constraints under selection bias"};
    app.require_subcommand(1);
    Options o;

    auto list = [](CLI::App* sub, const char* flag, std::vector<std::string>& target, const char* help, bool required) {
        auto* opt = sub->add_option(flag, target, help)->delimiter(',');
        if (required) opt->required();
    };

    auto* simulate = app.add_subcommand("simulate", "Draw post-selection samples from a model");
    simulate->add_option("--model", o.model, "Model JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--n", o.n, "Number of accepted samples")->required();
    simulate->add_option("--seed", o.seed, "Random seed")->required();
    simulate->add_option("--out", o.out, "Output CSV (default: stdout)");
    simulate->add_flag("--all-columns", o.all_columns, "Also write latent columns");

    auto* grank = app.add_subcommand("grank", "Graphical rank of a covariance block under selection");
    grank->add_option("--model", o.model, "Graph or model JSON")->required()->check(CLI::ExistingFile);
    list(grank, "--a", o.a, "Row variables, comma separated", true);
    list(grank, "--b", o.b, "Column variables, comma separated", true);

    auto* tsep = app.add_subcommand("tsep", "Check or minimize t-separation");
    tsep->add_option("--graph", o.graph, "Graph or model JSON")->required()->check(CLI::ExistingFile);
    list(tsep, "--a", o.a, "Set A", true);
    list(tsep, "--b", o.b, "Set B", true);
    list(tsep, "--c", o.c, "Set C (with --d: check this pair)", false);
    list(tsep, "--d", o.d, "Set D", false);

    auto* ranks = app.add_subcommand("ranks", "Estimate a covariance block rank from data");
    ranks->add_option("--data", o.data, "Data CSV")->required()->check(CLI::ExistingFile);
    list(ranks, "--a", o.a, "Row columns", true);
    list(ranks, "--b", o.b, "Column columns", true);
    ranks->add_option("--method", o.method, "cca or svd")->check(CLI::IsMember({"cca", "svd"}));
    ranks->add_option("--alpha", o.alpha, "Test level");
    ranks->add_option("--rel-tol", o.rel_tol, "Relative singular-value threshold");

    auto* discover = app.add_subcommand("discover", "Rank-oracle FCI over latents");
    discover->add_option("--data", o.data, "Data CSV")->required()->check(CLI::ExistingFile);
    discover->add_option("--clustering", o.clustering, "Clustering or model JSON")->required()->check(CLI::ExistingFile);
    discover->add_option("--method", o.method, "cca or svd")->check(CLI::IsMember({"cca", "svd"}));
    discover->add_option("--alpha", o.alpha, "Test level");
    discover->add_option("--rel-tol", o.rel_tol, "Relative singular-value threshold");
    discover->add_option("--max-cond", o.max_cond, "Largest conditioning set (-1: unbounded)");
    discover->add_option("--out", o.out, "PAG JSON output");

    auto* truth = app.add_subcommand("truth", "Ground-truth PAG from d-separation");
    truth->add_option("--model", o.model, "Graph or model JSON")->required()->check(CLI::ExistingFile);
    list(truth, "--vars", o.vars, "Variables (default: clustering latents, else observed nodes)", false);
    truth->add_option("--max-cond", o.max_cond, "Largest conditioning set (-1: unbounded)");
    truth->add_option("--out", o.out, "PAG JSON output");

    auto* eval = app.add_subcommand("eval", "Run a synthetic experiment");
    eval->add_option("--config", o.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", o.out, "Report directory")->required();
    eval->add_option("--seeds", o.seeds, "Seeds, overriding the config")->delimiter(',');
    eval->add_flag("--dry-run", o.dry_run, "Generate models and ground truth only");
    eval->add_flag("--timing", o.timing, "Record wall-clock times");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*simulate) return run_simulate(o);
        if (*grank) return run_grank(o);
        if (*tsep) return run_tsep(o);
        if (*ranks) return run_ranks(o);
        if (*discover) return run_discover(o);
        if (*truth) return run_truth(o);
        if (*eval) return run_eval(o);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
