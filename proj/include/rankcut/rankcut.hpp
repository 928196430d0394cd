#pragma once

#include "rankcut/error.hpp"
#include "rankcut/node_set.hpp"
#include "rankcut/dag.hpp"
#include "rankcut/selection.hpp"
#include "rankcut/augment.hpp"
#include "rankcut/sem.hpp"
#include "rankcut/sampling.hpp"
#include "rankcut/flow.hpp"
#include "rankcut/trek.hpp"
#include "rankcut/rank_infer.hpp"
#include "rankcut/pag.hpp"
#include "rankcut/fci.hpp"
#include "rankcut/latent.hpp"
#include "rankcut/io.hpp"
#include "rankcut/eval.hpp"
