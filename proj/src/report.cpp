#include "ttms/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ttms/errors.hpp"
#include "ttms/io.hpp"

namespace ttms {

namespace {

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string fmt(double v, int precision = 4) {
    if (std::isnan(v)) return "-";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

double to_double(const std::string &s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    try {
        return std::stod(s);
    } catch (const std::exception &) {
        throw FormatError("not a number: '" + s + "'");
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

std::string svg_chart(const std::string &title, const std::string &xlabel, const std::string &ylabel,
                      const std::vector<Series> &series) {
    const double w = 640, h = 400, l = 70, r = 140, t = 40, b = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto &s : series)
        for (const auto &[x, y] : s.points) {
            if (std::isnan(y)) continue;
            x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return l + (x - x0) / (x1 - x0) * (w - l - r); };
    auto py = [&](double y) { return h - b - (y - y0) / (y1 - y0) * (h - t - b); };
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
      << "<line x1=\"" << l << "\" y1=\"" << h - b << "\" x2=\"" << w - r << "\" y2=\"" << h - b << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << l << "\" y1=\"" << t << "\" x2=\"" << l << "\" y2=\"" << h - b << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (l + w - r) / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
      << "<text x=\"15\" y=\"" << (t + h - b) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << (t + h - b) / 2 << ")\">" << ylabel << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
        o << "<text x=\"" << px(xv) << "\" y=\"" << h - b + 16 << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n"
          << "<text x=\"" << l - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char *c = colors[i % 6];
        o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (const auto &[x, y] : series[i].points)
            if (!std::isnan(y)) o << px(x) << ',' << py(y) << ' ';
        o << "\"/>\n<text x=\"" << w - r + 10 << "\" y=\"" << t + 16 * (i + 1) << "\" fill=\"" << c << "\">"
          << series[i].name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace

std::size_t CsvTable::column(const std::string &name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw FormatError("missing CSV column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

CsvTable read_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + " is empty");
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != t.columns.size()) throw FormatError(path.string() + ": row width mismatch");
        t.rows.push_back(std::move(row));
    }
    return t;
}

ExperimentDigest digest_experiment(const std::filesystem::path &dir) {
    ExperimentDigest d;
    {
        const auto t = read_csv(dir / "max_reward.csv");
        const auto cm = t.column("model"), ct = t.column("tasks"), cr = t.column("max_reward");
        std::map<std::string, std::map<int, std::vector<double>>> acc;
        for (const auto &r : t.rows)
            if (!r[cr].empty()) acc[r[cm]][std::stoi(r[ct])].push_back(to_double(r[cr]));
        for (const auto &[m, by] : acc)
            for (const auto &[n, v] : by) {
                double s = 0;
                for (double x : v) s += x;
                d.mean_max_reward[m][n] = s / static_cast<double>(v.size());
            }
    }
    {
        const auto t = read_csv(dir / "decision_time.csv");
        const auto cm = t.column("model"), ct = t.column("tasks"), cn = t.column("median_ns");
        std::map<std::string, std::map<int, std::vector<double>>> acc;
        for (const auto &r : t.rows) acc[r[cm]][std::stoi(r[ct])].push_back(to_double(r[cn]));
        for (const auto &[m, by] : acc)
            for (const auto &[n, v] : by) d.median_decision_ns[m][n] = median(v);
    }
    {
        const auto t = read_csv(dir / "traces.csv");
        const auto cs = t.column("scenario"), ce = t.column("event"), cm = t.column("model"), ck = t.column("episode"),
                   cr = t.column("reward"), cp = t.column("prediction_error");
        // Group rows by cell, preserving file order.
        std::map<std::string, std::vector<std::pair<double, double>>> cells;
        std::map<std::string, std::string> cell_model;
        std::map<std::string, std::vector<std::pair<double, std::size_t>>> reward_sum;
        for (const auto &r : t.rows) {
            const std::string key = r[cs] + "/" + r[ce] + "/" + r[cm];
            cells[key].push_back({to_double(r[cr]), to_double(r[cp])});
            cell_model[key] = r[cm];
            auto &sums = reward_sum[r[cm]];
            const auto k = static_cast<std::size_t>(std::stoul(r[ck]));
            if (sums.size() <= k) sums.resize(k + 1, {0.0, 0});
            sums[k].first += to_double(r[cr]);
            ++sums[k].second;
        }
        for (const auto &[m, sums] : reward_sum)
            for (const auto &[s, n] : sums) d.mean_reward_by_episode[m].push_back(n ? s / static_cast<double>(n) : 0.0);
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> err;
        for (const auto &[key, rows] : cells) {
            const std::size_t tenth = rows.size() / 10;
            if (tenth == 0 || std::isnan(rows.front().second)) continue;
            double first = 0, last = 0;
            for (std::size_t i = 0; i < tenth; ++i) first += rows[i].second, last += rows[rows.size() - tenth + i].second;
            err[cell_model[key]].first.push_back(first / static_cast<double>(tenth));
            err[cell_model[key]].second.push_back(last / static_cast<double>(tenth));
        }
        for (const auto &[m, fl] : err) {
            double a = 0, b = 0;
            for (double x : fl.first) a += x;
            for (double x : fl.second) b += x;
            d.prediction_error[m] = {a / static_cast<double>(fl.first.size()), b / static_cast<double>(fl.second.size())};
        }
    }
    if (std::filesystem::exists(dir / "epsilon_sweep.csv")) {
        const auto t = read_csv(dir / "epsilon_sweep.csv");
        const auto cd = t.column("decay"), cr = t.column("max_reward");
        std::map<double, std::vector<double>> acc;
        for (const auto &r : t.rows) acc[to_double(r[cd])].push_back(to_double(r[cr]));
        for (const auto &[k, v] : acc) {
            double s = 0;
            for (double x : v) s += x;
            d.sweep_mean_max_reward[k] = s / static_cast<double>(v.size());
        }
    }
    return d;
}

std::string write_report(const std::filesystem::path &dir, bool plot) {
    std::ostringstream md;
    md << "# Experiment report: " << dir.string() << "\n\n";
    const bool has_experiment = std::filesystem::exists(dir / "max_reward.csv");
    const bool has_retrain = std::filesystem::exists(dir / "retrain_summary.json");
    if (!has_experiment && !has_retrain) throw FormatError(dir.string() + " holds no experiment or retraining output");
    const std::filesystem::path plots = dir / "plots";

    if (has_experiment) {
        const auto d = digest_experiment(dir);
        std::set<int> tasks;
        for (const auto &[m, by] : d.mean_max_reward)
            for (const auto &[n, v] : by) tasks.insert(n);
        auto table = [&](const std::string &title, const std::map<std::string, std::map<int, double>> &data) {
            md << "## " << title << "\n\n| model |";
            for (int n : tasks) md << ' ' << n << " tasks |";
            md << "\n|---|";
            for (std::size_t i = 0; i < tasks.size(); ++i) md << "---|";
            md << '\n';
            for (const auto &[m, by] : data) {
                md << "| " << m << " |";
                for (int n : tasks) md << ' ' << (by.contains(n) ? fmt(by.at(n), 6) : "-") << " |";
                md << '\n';
            }
            md << '\n';
        };
        table("Mean maximum reward", d.mean_max_reward);
        table("Median decision time (ns)", d.median_decision_ns);
        if (!d.prediction_error.empty()) {
            md << "## Prediction error (mean absolute, normalised reward units)\n\n| model | first 10% | last 10% |\n|---|---|---|\n";
            for (const auto &[m, fl] : d.prediction_error) md << "| " << m << " | " << fmt(fl.first) << " | " << fmt(fl.second) << " |\n";
            md << '\n';
        }
        if (!d.sweep_mean_max_reward.empty()) {
            md << "## Epsilon decay sweep (MAB)\n\n| decay | mean max reward |\n|---|---|\n";
            for (const auto &[k, v] : d.sweep_mean_max_reward) md << "| " << fmt(k) << " | " << fmt(v, 6) << " |\n";
            md << '\n';
        }
        if (plot) {
            std::vector<Series> s15, s16, s18;
            for (const auto &[m, v] : d.mean_reward_by_episode) {
                Series s{m, {}};
                for (std::size_t k = 0; k < v.size(); ++k) s.points.push_back({static_cast<double>(k), v[k]});
                s15.push_back(std::move(s));
            }
            for (const auto &[m, by] : d.mean_max_reward) {
                Series s{m, {}};
                for (const auto &[n, v] : by) s.points.push_back({static_cast<double>(n), v});
                s16.push_back(std::move(s));
            }
            for (const auto &[m, by] : d.median_decision_ns) {
                Series s{m, {}};
                for (const auto &[n, v] : by) s.points.push_back({static_cast<double>(n), v});
                s18.push_back(std::move(s));
            }
            Series s14{"mab", {}};
            for (const auto &[k, v] : d.sweep_mean_max_reward) s14.points.push_back({k, v});
            write_text_file(plots / "reward_vs_episode.svg", svg_chart("Mean reward per episode", "episode", "reward", s15));
            write_text_file(plots / "max_reward_vs_tasks.svg", svg_chart("Mean maximum reward", "tasks", "reward", s16));
            write_text_file(plots / "decision_time_vs_tasks.svg", svg_chart("Median decision time", "tasks", "ns", s18));
            write_text_file(plots / "epsilon_sweep.svg", svg_chart("Epsilon decay sweep", "decay", "mean max reward", {s14}));
        }
    }

    if (has_retrain) {
        const Json s = read_json_file(dir / "retrain_summary.json");
        md << "## Retraining\n\n"
           << "- trained: " << s.at("trained").dump() << ", committed: " << s.at("committed").dump() << "\n"
           << "- validation metric (mean makespan): candidate " << s.at("candidate_metric").dump() << ", incumbent "
           << s.at("incumbent_metric").dump() << "\n"
           << "- held-out mean makespan: before " << s.at("heldout_pre_mean_makespan").dump() << ", after "
           << s.at("heldout_post_mean_makespan").dump() << "\n"
           << "- held-out deadline rate: before " << s.at("heldout_pre_deadline_rate").dump() << ", after "
           << s.at("heldout_post_deadline_rate").dump() << "\n"
           << "- training samples: " << s.at("training_samples").dump() << ", no-feasible instances: "
           << s.at("no_feasible").dump() << "\n\n";
        if (plot && std::filesystem::exists(dir / "retrain.csv")) {
            const auto t = read_csv(dir / "retrain.csv");
            const auto csplit = t.column("split"), cpre = t.column("pre_makespan"), cpost = t.column("post_makespan"),
                       cdl = t.column("deadline");
            Series pre{"before", {}}, post{"after", {}}, dl{"deadline", {}};
            double k = 0;
            for (const auto &r : t.rows) {
                if (r[csplit] != "test") continue;
                pre.points.push_back({k, to_double(r[cpre])});
                post.points.push_back({k, to_double(r[cpost])});
                dl.points.push_back({k, to_double(r[cdl])});
                ++k;
            }
            write_text_file(plots / "retrain_heldout.svg",
                            svg_chart("Held-out makespan before and after retraining", "instance", "makespan", {pre, post, dl}));
        }
    }
    const std::string text = md.str();
    write_text_file(dir / "report.md", text);
    return text;
}

} // namespace ttms
