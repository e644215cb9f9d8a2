#include "ttpbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ttpbench/error.hpp"

namespace ttpbench {

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<SettingMean> fold_means(const std::vector<CellResult>& results) {
    struct Acc {
        double p = 0, r = 0, f = 0, a = 0;
        int count = 0;
    };
    std::map<std::tuple<std::string, std::string, int, std::string>, Acc> acc;
    for (const auto& c : results) {
        auto& a = acc[{c.key.method, c.key.classifier, c.key.n, c.key.oversampled}];
        a.p += c.precision;
        a.r += c.recall;
        a.f += c.f1;
        a.a += c.auc;
        ++a.count;
    }
    std::vector<SettingMean> out;
    for (const auto& [k, a] : acc) {
        const auto& [m, cl, n, o] = k;
        out.push_back({m, cl, n, o, a.p / a.count, a.r / a.count, a.f / a.count, a.a / a.count});
    }
    return out;
}

int gain_percent(int no, int yes) {
    if (no == 0) throw Error("gain: baseline is zero");
    return static_cast<int>(std::floor(100.0 * (yes - no) / no + 0.5 + 1e-9));
}

std::string render_table4(const std::vector<CellResult>& results, const std::string& oversampled) {
    std::map<std::pair<std::string, std::string>, std::vector<SettingMean>> groups;
    for (const auto& s : fold_means(results))
        if (s.oversampled == oversampled) groups[{s.method, s.classifier}].push_back(s);
    if (groups.empty()) throw Error("no results with oversampled=" + oversampled);
    std::ostringstream out;
    out << "| Method | Classifier | Precision | Recall | F1 | AUC |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& [key, settings] : groups) {
        std::vector<double> p, r, f, a;
        for (const auto& s : settings) {
            p.push_back(s.precision);
            r.push_back(s.recall);
            f.push_back(s.f1);
            a.push_back(s.auc);
        }
        out << "| M:" << key.first << " | " << key.second << " | " << aggregate(p).render() << " | "
            << aggregate(r).render() << " | " << aggregate(f).render() << " | " << aggregate(a).render() << " |\n";
    }
    return out.str();
}

std::string render_table5(const std::vector<CellResult>& results) {
    std::map<std::string, std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>> by_method;
    for (const auto& s : fold_means(results)) {
        auto& slot = by_method[s.method][s.oversampled];
        slot.first.push_back(s.f1);
        slot.second.push_back(s.auc);
    }
    if (by_method.empty()) throw Error("no results");
    std::ostringstream out;
    out << "| Method | Metric | No | Yes | Gain(%) |\n";
    out << "|---|---|---|---|---|\n";
    bool any = false;
    for (const auto& [method, modes] : by_method) {
        const auto no = modes.find("none");
        auto yes = modes.find("full_dataset");
        if (yes == modes.end()) yes = modes.find("train_only");
        if (no == modes.end() || yes == modes.end()) continue;
        any = true;
        const int f_no = to_percent(mean_of(no->second.first));
        const int f_yes = to_percent(mean_of(yes->second.first));
        const int a_no = to_percent(mean_of(no->second.second));
        const int a_yes = to_percent(mean_of(yes->second.second));
        out << "| M:" << method << " | F1 | " << f_no << " | " << f_yes << " | " << gain_percent(f_no, f_yes) << " |\n";
        out << "| M:" << method << " | AUC | " << a_no << " | " << a_yes << " | " << gain_percent(a_no, a_yes)
            << " |\n";
    }
    if (!any) throw Error("table5 needs results both with oversampled=none and with oversampling");
    return out.str();
}

std::string render_boxplot_data(const std::vector<CellResult>& results) {
    const auto means = fold_means(results);
    if (means.empty()) throw Error("no results");
    std::ostringstream out;
    out << "method,classifier,n,oversampled,metric,value\n";
    for (const auto& s : means) {
        const std::string prefix = s.method + "," + s.classifier + "," + std::to_string(s.n) + "," + s.oversampled + ",";
        out << prefix << "precision," << fixed6(s.precision) << "\n";
        out << prefix << "recall," << fixed6(s.recall) << "\n";
        out << prefix << "f1," << fixed6(s.f1) << "\n";
        out << prefix << "auc," << fixed6(s.auc) << "\n";
    }
    return out.str();
}

}  // namespace ttpbench
