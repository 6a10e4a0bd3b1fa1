#pragma once

#include <cstdint>
#include <string>

#include "msgcn/raster.hpp"

namespace msgcn {

struct Confusion {
    int64_t tp = 0, fp = 0, tn = 0, fn = 0;  // changed = positive
    int64_t total() const { return tp + fp + tn + fn; }
};

struct MetricReport {
    double far = 0.0;    // FP / (FP + TN)
    double mar = 0.0;    // FN / (FN + TP)
    double oa = 0.0;     // (TP + TN) / total
    double kappa = 0.0;  // Cohen's kappa
};

Confusion confusion(const ChangeMap& predicted, const ChangeMap& reference);

// Degenerate denominators: FAR := 0 when FP+TN = 0, MAR := 0 when FN+TP = 0,
// kappa := 1 on an exact single-class match, 0 when PRE = 1 otherwise.
MetricReport metrics(const Confusion& c);

std::string metrics_csv_row(const MetricReport& report);
std::string metrics_table(const MetricReport& report);  // percentages, 2 decimals

}  // namespace msgcn
