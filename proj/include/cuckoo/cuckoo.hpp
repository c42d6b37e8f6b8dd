#pragma once

#include "cuckoo/binomial.hpp"
#include "cuckoo/estimation.hpp"
#include "cuckoo/exhaustive.hpp"
#include "cuckoo/experiment.hpp"
#include "cuckoo/graph.hpp"
#include "cuckoo/hash_pair.hpp"
#include "cuckoo/orientation.hpp"
#include "cuckoo/params.hpp"
#include "cuckoo/rng.hpp"
#include "cuckoo/stash_table.hpp"
#include "cuckoo/union_bound.hpp"
