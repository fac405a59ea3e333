#pragma once

#include "crackpot/error.hpp"

namespace crackpot {

// Binary-classification counts and the measures derived from them.
// Any 0/0 ratio is reported as 0 and flags the report as degenerate.
struct MetricsReport {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    bool degenerate = false;
};

double f1_from_pr(double precision, double recall);
MetricsReport compute_metrics(long long tp, long long fp, long long tn, long long fn);

}  // namespace crackpot
