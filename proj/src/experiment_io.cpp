#include "wifitrack/experiment_io.hpp"

#include <algorithm>

#include "wifitrack/csv.hpp"

namespace wifitrack {

void write_grid_csv(std::span<const ExperimentResult> results, const std::filesystem::path& path) {
    CsvWriter w(path, {"strategy", "param", "scenario", "day", "mean_coverage", "n_users"});
    for (const auto& r : results)
        for (const auto& [day, mean] : r.series.daily_mean)
            w.row({strategy_name(r.strategy), strategy_param(r.strategy), scenario_name(r.scenario),
                   std::to_string(day), format_double(mean),
                   std::to_string(r.series.daily_users.at(day))});
    w.close();
}

void write_coverage_csv(std::span<const ExperimentResult> results,
                        const std::filesystem::path& path) {
    CsvWriter w(path, {"day_index", "scenario", "strategy", "param", "mean_coverage", "n_users"});
    for (const auto& r : results)
        for (const auto& [day, mean] : r.series.daily_mean)
            w.row({std::to_string(day), scenario_name(r.scenario), strategy_name(r.strategy),
                   strategy_param(r.strategy), format_double(mean),
                   std::to_string(r.series.daily_users.at(day))});
    w.close();
}

void write_histograms_csv(std::span<const ExperimentResult> results,
                          const std::filesystem::path& path) {
    CsvWriter w(path, {"strategy", "param", "scenario", "day", "bin_lo", "count"});
    for (const auto& r : results)
        for (const auto& [day, h] : r.histograms)
            for (std::size_t b = 0; b < h.size(); ++b)
                w.row({strategy_name(r.strategy), strategy_param(r.strategy),
                       scenario_name(r.scenario), std::to_string(day),
                       format_fixed(static_cast<double>(b) * kHistogramWidth, 1),
                       std::to_string(h[b])});
    w.close();
}

void write_svg_plot(std::span<const ExperimentResult> results, const std::string& title,
                    const std::filesystem::path& path) {
    constexpr double W = 640, H = 400, L = 50, R = 170, T = 30, B = 40;
    std::int64_t max_day = 1;
    for (const auto& r : results)
        if (!r.series.daily_mean.empty())
            max_day = std::max(max_day, r.series.daily_mean.rbegin()->first);
    const auto x = [&](double d) { return L + (W - L - R) * d / static_cast<double>(max_day); };
    const auto y = [&](double c) { return H - B - (H - T - B) * c; };
    static constexpr const char* kColors[] = {"#1b6ca8", "#d1495b", "#66a182", "#edae49",
                                              "#8d6a9f", "#444444"};

    auto out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << L << "\" y=\"18\">" << title << "</text>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << x(max_day) << "\" y2=\""
        << y(0) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << L << "\" y2=\"" << y(1)
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double c = k * 0.25;
        out << "<text x=\"" << L - 6 << "\" y=\"" << y(c) + 4 << "\" text-anchor=\"end\">"
            << format_fixed(c, 2) << "</text>\n";
    }
    out << "<text x=\"" << x(0) << "\" y=\"" << H - B + 16 << "\">0</text>\n";
    out << "<text x=\"" << x(max_day) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\">"
        << max_day << "</text>\n";
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8
        << "\" text-anchor=\"middle\">day</text>\n";

    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const char* color = kColors[i % std::size(kColors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [day, mean] : r.series.daily_mean)
            out << format_fixed(x(static_cast<double>(day)), 1) << ',' << format_fixed(y(mean), 1)
                << ' ';
        out << "\"/>\n";
        const double ly = T + 16.0 * static_cast<double>(i);
        out << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << W - R + 35 << "\" y=\"" << ly + 4 << "\">"
            << scenario_name(r.scenario) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("failed writing " + path.string());
}

void write_grid_plots(std::span<const ExperimentResult> results, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::size_t i = 0;
    while (i < results.size()) {
        std::size_t j = i + 1;
        while (j < results.size() && results[j].strategy == results[i].strategy) ++j;
        const std::string name =
            std::string(strategy_name(results[i].strategy)) + "_" + strategy_param(results[i].strategy);
        write_svg_plot(results.subspan(i, j - i), name, dir / (name + ".svg"));
        i = j;
    }
}

}  // namespace wifitrack
