#include "crackpot/metrics.hpp"

namespace crackpot {

double f1_from_pr(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

MetricsReport compute_metrics(long long tp, long long fp, long long tn, long long fn) {
    if (tp < 0 || fp < 0 || tn < 0 || fn < 0)
        throw InvalidParameterError("dataeval.compute_metrics: counts must be non-negative");
    if (tp + fp + tn + fn == 0)
        throw InvalidParameterError("dataeval.compute_metrics: no samples");

    MetricsReport r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    if (tp + fp == 0) {
        r.precision = 0.0;
        r.degenerate = true;
    } else {
        r.precision = double(tp) / double(fp + tp);
    }
    if (tp + fn == 0) {
        r.recall = 0.0;
        r.degenerate = true;
    } else {
        r.recall = double(tp) / double(tp + fn);
    }
    if (r.precision + r.recall == 0.0) {
        r.f1 = 0.0;
        r.degenerate = true;
    } else {
        r.f1 = f1_from_pr(r.precision, r.recall);
    }
    r.accuracy = double(tp + tn) / double(tp + tn + fp + fn);
    return r;
}

}  // namespace crackpot
