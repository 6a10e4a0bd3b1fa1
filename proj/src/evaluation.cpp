#include "msgcn/evaluation.hpp"

#include <cstdio>
#include <stdexcept>

namespace msgcn {

Confusion confusion(const ChangeMap& predicted, const ChangeMap& reference) {
    if (predicted.width != reference.width || predicted.height != reference.height)
        throw std::runtime_error("confusion: size mismatch");
    Confusion c;
    for (size_t i = 0; i < predicted.labels.size(); ++i) {
        const bool p = predicted.labels[i] != 0;
        const bool r = reference.labels[i] != 0;
        if (p && r) ++c.tp;
        else if (p && !r) ++c.fp;
        else if (!p && r) ++c.fn;
        else ++c.tn;
    }
    return c;
}

MetricReport metrics(const Confusion& c) {
    const double total = static_cast<double>(c.total());
    if (total <= 0.0) throw std::runtime_error("metrics: empty confusion");

    MetricReport m;
    m.far = (c.fp + c.tn) > 0 ? static_cast<double>(c.fp) / (c.fp + c.tn) : 0.0;
    m.mar = (c.fn + c.tp) > 0 ? static_cast<double>(c.fn) / (c.fn + c.tp) : 0.0;
    m.oa = static_cast<double>(c.tp + c.tn) / total;

    const double pre =
        (static_cast<double>(c.tp + c.fn) * (c.tp + c.fp) +
         static_cast<double>(c.tn + c.fp) * (c.tn + c.fn)) /
        (total * total);
    if (pre >= 1.0) {
        m.kappa = (c.fp == 0 && c.fn == 0) ? 1.0 : 0.0;
    } else {
        m.kappa = (m.oa - pre) / (1.0 - pre);
    }
    return m;
}

std::string metrics_csv_row(const MetricReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", r.far, r.mar, r.oa, r.kappa);
    return buf;
}

std::string metrics_table(const MetricReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "FAR    %6.2f %%\nMAR    %6.2f %%\nOA     %6.2f %%\nKappa  %6.2f %%\n",
                  100.0 * r.far, 100.0 * r.mar, 100.0 * r.oa, 100.0 * r.kappa);
    return buf;
}

}  // namespace msgcn
