#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the implementation paths these oracles check.

#include <cstddef>
#include <vector>

#include "prosabx/dtw.hpp"
#include "prosabx/features.hpp"
#include "prosabx/manifest.hpp"

namespace oracle {

// Minimum over every monotone contiguous path from (0,0) to (T1-1,T2-1) of
// the left-to-right sum of frame distances, found by exhaustive recursion.
double brute_force_dtw(const prosabx::FeatureSequence& a, const prosabx::FeatureSequence& b,
                       prosabx::Metric metric);

// Number of monotone contiguous paths through an n x m grid.
std::size_t count_paths(std::size_t n, std::size_t m);

// Every (a, b, x) item-index triple that satisfies the triplet constraints,
// found by a triple loop over all items.
std::vector<prosabx::Triplet> brute_force_triplets(const prosabx::Dataset& ds);

// Two-sided signed-rank p value by enumerating all 2^n sign assignments of
// the observed mid-ranks. Zero differences are dropped.
double sign_flip_p(const std::vector<double>& diffs);

// Mid-ranks by counting: rank = 1 + #smaller + (#equal - 1) / 2.
std::vector<double> count_ranks(const std::vector<double>& v);

// Textbook two-pass Pearson r.
double textbook_pearson(const std::vector<double>& x, const std::vector<double>& y);

// Plain angle between vectors via atan2(|u x v|, u.v) generalised with
// Lagrange's identity; independent of the acos-of-cosine route.
double angle_over_pi(const std::vector<double>& u, const std::vector<double>& v);

}  // namespace oracle
