// evclust command line: cluster detection, synthetic streams, oracle
// verification, throughput benchmarks, and scatter-plot exports.
//
// Exit codes: 0 success, 1 bad flags or a non-empty verify diff, 2 input
// validation or I/O failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evclust/bench.hpp"
#include "evclust/clusterer.hpp"
#include "evclust/io.hpp"
#include "evclust/oracle.hpp"
#include "evclust/synth.hpp"

using json = nlohmann::ordered_json;
using namespace evclust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;

struct InputOptions {
    std::string path;
    std::string format;  // "", "csv", "evc1"
    int width = 0;
    int height = 0;
    std::string polarity = "both";
};

struct ParamOptions {
    std::uint64_t delta = 2000;
    int radius = 1;
    std::uint64_t min_events = 10;
    std::uint64_t min_pixels = 5;

    ClusterParams params() const {
        return {delta, radius, min_events, min_pixels};
    }
};

void add_input_flags(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.path, "event file to read")->required();
    cmd->add_option("--format", in.format,
                    "input format: csv or evc1 (default: by extension)")
        ->check(CLI::IsMember({"csv", "evc1"}));
    cmd->add_option("--width", in.width, "sensor width in pixels")->required();
    cmd->add_option("--height", in.height, "sensor height in pixels")
        ->required();
    cmd->add_option("--polarity", in.polarity,
                    "keep only this polarity before clustering")
        ->check(CLI::IsMember({"pos", "neg", "both"}));
}

void add_param_flags(CLI::App* cmd, ParamOptions& p) {
    cmd->add_option("--delta-us", p.delta,
                    "maximal temporal distance within a cluster (us)");
    cmd->add_option("--radius", p.radius,
                    "maximal Chebyshev pixel distance within a cluster");
    cmd->add_option("--min-events", p.min_events,
                    "minimal events for a reported cluster");
    cmd->add_option("--min-pixels", p.min_pixels,
                    "minimal contributing pixels for a reported cluster");
}

std::optional<EventFormat> parse_format(const std::string& format) {
    if (format == "csv") return EventFormat::Csv;
    if (format == "evc1") return EventFormat::Evc1;
    return std::nullopt;
}

std::vector<Event> filter_polarity(const std::vector<Event>& events,
                                   const std::string& polarity) {
    if (polarity == "both") return events;
    const Polarity keep = polarity == "pos" ? 1 : -1;
    std::vector<Event> out;
    out.reserve(events.size());
    for (const Event& e : events)
        if (e.p == keep) out.push_back(e);
    return out;
}

/// Reads, polarity-filters, and order-checks the input stream.
/// Throws evclust errors; the caller maps them to exit codes.
std::vector<Event> load_stream(const InputOptions& in) {
    auto events = read_events_file(in.path, parse_format(in.format));
    events = filter_polarity(events, in.polarity);
    if (const auto bad = validate_monotonic(events))
        throw StreamError("input is not sorted by timestamp at event index " +
                              std::to_string(*bad),
                          *bad);
    return events;
}

json record_json(const ClusterRecord& r) {
    return {{"root_t_us", r.root_t}, {"root_x", r.root_x},
            {"root_y", r.root_y},   {"end_t_us", r.end_t},
            {"event_count", r.event_count}, {"pixel_count", r.pixel_count}};
}

struct RunSummary {
    std::size_t events_in = 0;
    std::size_t events_after_polarity_filter = 0;
    std::size_t rows_emitted = 0;
    std::uint64_t wall_time_us = 0;
    double events_per_second = 0.0;

    json to_json() const {
        return {{"events_in", events_in},
                {"events_after_polarity_filter", events_after_polarity_filter},
                {"rows_emitted", rows_emitted},
                {"wall_time_us", wall_time_us},
                {"events_per_second", events_per_second}};
    }
};

void write_file_or_stdout(const std::string& path,
                          const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw Error("write to " + path + " failed");
}

// --- cluster ---------------------------------------------------------

struct ClusterOptions {
    InputOptions in;
    ParamOptions params;
    std::string output;
    std::string detections;
    bool summary = false;
};

int run_cluster(const ClusterOptions& opt) {
    const SensorGeometry geom{opt.in.width, opt.in.height};
    const auto events_in = read_events_file(opt.in.path,
                                            parse_format(opt.in.format));
    const auto events = filter_polarity(events_in, opt.in.polarity);
    if (const auto bad = validate_monotonic(events)) {
        std::cerr << "evclust: input is not sorted by timestamp at event index "
                  << *bad << "\n";
        return kExitInput;
    }

    std::ofstream detections;
    if (!opt.detections.empty()) {
        detections.open(opt.detections);
        if (!detections) throw Error("cannot open " + opt.detections);
    }

    StreamClusterer clusterer(geom, opt.params.params());
    const auto t0 = std::chrono::steady_clock::now();
    for (const Event& e : events) {
        const StepOutcome out = clusterer.process(e);
        if (out.detection && detections.is_open()) {
            const DetectionEvent& det = *out.detection;
            json line{{"kind", det.freshness == DetectionEvent::Freshness::NewRow
                                   ? "new_row"
                                   : "updated_row"},
                      {"row", det.row_index},
                      {"record", record_json(det.record)}};
            detections << line.dump() << '\n';
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    const auto wall_us = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0)
            .count());

    std::ostringstream csv;
    write_clusters_csv(clusterer.results(), csv);
    write_file_or_stdout(opt.output, csv.str());

    if (opt.summary) {
        RunSummary summary;
        summary.events_in = events_in.size();
        summary.events_after_polarity_filter = events.size();
        summary.rows_emitted = clusterer.results().size();
        summary.wall_time_us = wall_us;
        summary.events_per_second =
            wall_us == 0 ? 0.0
                         : static_cast<double>(events.size()) * 1e6 /
                               static_cast<double>(wall_us);
        std::cout << summary.to_json().dump() << "\n";
    }
    return kExitOk;
}

// --- synth -----------------------------------------------------------

struct SynthOptions {
    std::string signal = "lamp";
    LampConfig lamp;
    std::vector<std::string> hot_pixels;
    double background_rate = 0.0;
    std::uint64_t duration = 0;
    std::uint64_t seed = 1;
    std::string out;
    std::string format;
};

int run_synth(const SynthOptions& opt) {
    NoiseConfig noise;
    noise.geometry = opt.lamp.geometry;
    noise.background_rate = opt.background_rate;
    noise.seed = opt.seed + 0x9E37;
    for (const std::string& raw : opt.hot_pixels) {
        std::uint32_t x = 0, y = 0;
        double rate = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream parse(raw);
        if (!(parse >> x >> c1 >> y >> c2 >> rate) || c1 != ',' || c2 != ',') {
            std::cerr << "evclust: --hot-pixel expects X,Y,RATE, got '" << raw
                      << "'\n";
            return kExitUsage;
        }
        noise.hot_pixels.push_back(
            {{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y)},
             rate});
    }

    std::vector<std::vector<Event>> parts;
    LampConfig lamp = opt.lamp;
    lamp.seed = opt.seed;
    if (opt.signal == "lamp") parts.push_back(gen_lamp(lamp));

    noise.duration = opt.duration;
    if (noise.duration == 0 && opt.signal == "lamp")
        noise.duration = static_cast<Timestamp>(
            lamp.periods * std::llround(1e6 / lamp.frequency));
    parts.push_back(gen_noise(noise));

    write_events_file(merge_streams(parts), opt.out,
                      parse_format(opt.format));
    return kExitOk;
}

// --- verify ----------------------------------------------------------

struct VerifyOptions {
    InputOptions in;
    ParamOptions params;
    bool allow_pixel_count_divergence = false;
};

int run_verify(const VerifyOptions& opt) {
    const SensorGeometry geom{opt.in.width, opt.in.height};
    const auto events = load_stream(opt.in);
    const ClusterParams params = opt.params.params();

    StreamClusterer clusterer(geom, params);
    for (const Event& e : events) clusterer.process(e);

    const auto forest = build_polyforest(events, params.delta, params.d);
    const auto oracle_rows =
        qualifying_roots(component_summaries(forest), params.n, params.m);
    const auto report = equivalence_report(oracle_rows, clusterer.results());

    json out{{"exact", report.exact()},
             {"oracle_rows", oracle_rows.size()},
             {"stream_rows", clusterer.results().size()},
             {"matched", report.matched.size()}};
    json mismatches = json::array();
    for (const auto& mm : report.field_mismatches)
        mismatches.push_back({{"fields", mm.fields},
                              {"oracle", record_json(mm.oracle)},
                              {"stream", record_json(mm.stream)}});
    out["field_mismatches"] = mismatches;
    json oracle_only = json::array(), stream_only = json::array();
    for (const auto& r : report.oracle_only)
        oracle_only.push_back(record_json(r));
    for (const auto& r : report.stream_only)
        stream_only.push_back(record_json(r));
    out["oracle_only"] = oracle_only;
    out["stream_only"] = stream_only;
    std::cout << out.dump(2) << "\n";

    if (report.exact()) return kExitOk;
    if (opt.allow_pixel_count_divergence &&
        report.pixel_count_divergence_only()) {
        std::cerr << "evclust: warning: " << report.field_mismatches.size()
                  << " pixel-count divergence(s) tolerated\n";
        return kExitOk;
    }
    return kExitUsage;
}

// --- bench -----------------------------------------------------------

struct BenchOptions {
    std::vector<std::uint64_t> events{100000, 1000000};
    std::vector<std::string> geometries{"128x128", "1280x720"};
    int repeat = 5;
    std::uint64_t seed = 1;
    ParamOptions params{2000, 1, 10, 5};
};

int run_bench(const BenchOptions& opt) {
    std::cout << "geometry,events,alloc_us,total_us,ns_per_event\n";
    for (const std::uint64_t n : opt.events) {
        const auto stream = gen_bench_stream(n, opt.seed);
        for (const std::string& raw : opt.geometries) {
            int w = 0, h = 0;
            char x = 0;
            std::istringstream parse(raw);
            if (!(parse >> w >> x >> h) || x != 'x') {
                std::cerr << "evclust: --geometry expects WxH, got '" << raw
                          << "'\n";
                return kExitUsage;
            }
            const auto m = measure_throughput(stream, {w, h},
                                              opt.params.params(), opt.repeat);
            std::cout << w << 'x' << h << ',' << m.events << ',' << m.alloc_us
                      << ',' << m.total_us << ',' << m.ns_per_event << "\n";
        }
    }
    return kExitOk;
}

// --- plot-data -------------------------------------------------------

struct PlotOptions {
    InputOptions in;
    ParamOptions params;
    std::string roi;  // "X0,Y0,X1,Y1"
    std::string out;
};

int run_plot_data(const PlotOptions& opt) {
    const SensorGeometry geom{opt.in.width, opt.in.height};
    const auto events = load_stream(opt.in);

    StreamClusterer clusterer(geom, opt.params.params());
    for (const Event& e : events) clusterer.process(e);

    int x0 = 0, y0 = 0, x1 = geom.width - 1, y1 = geom.height - 1;
    if (!opt.roi.empty()) {
        char c1 = 0, c2 = 0, c3 = 0;
        std::istringstream parse(opt.roi);
        if (!(parse >> x0 >> c1 >> y0 >> c2 >> x1 >> c3 >> y1) || c1 != ',' ||
            c2 != ',' || c3 != ',') {
            std::cerr << "evclust: --roi expects X0,Y0,X1,Y1, got '" << opt.roi
                      << "'\n";
            return kExitUsage;
        }
    }

    // Each output row marks exactly one event as its cluster's root.
    std::multiset<std::tuple<Timestamp, int, int>> roots;
    for (const ClusterRecord& r : clusterer.results())
        roots.insert({r.root_t, r.root_x, r.root_y});

    std::ostringstream csv;
    csv << "t,x,y,p,is_root\n";
    for (const Event& e : events) {
        if (e.x < x0 || e.x > x1 || e.y < y0 || e.y > y1) continue;
        int is_root = 0;
        const auto key = std::tuple<Timestamp, int, int>{e.t, e.x, e.y};
        if (auto it = roots.find(key); it != roots.end()) {
            roots.erase(it);
            is_root = 1;
        }
        csv << e.t << ',' << e.x << ',' << e.y << ','
            << static_cast<int>(e.p) << ',' << is_root << '\n';
    }
    write_file_or_stdout(opt.out, csv.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-camera cluster detection toolkit"};
    app.require_subcommand(1);

    ClusterOptions cluster_opt;
    CLI::App* cluster = app.add_subcommand(
        "cluster", "run the streaming detector over an event file");
    add_input_flags(cluster, cluster_opt.in);
    add_param_flags(cluster, cluster_opt.params);
    cluster->add_option("--output", cluster_opt.output,
                        "clusters CSV path (default: stdout)");
    cluster->add_option("--detections", cluster_opt.detections,
                        "write JSON-lines detection log here");
    cluster->add_flag("--summary", cluster_opt.summary,
                      "print a run summary as JSON");

    SynthOptions synth_opt;
    CLI::App* synth =
        app.add_subcommand("synth", "generate a synthetic event stream");
    synth->add_option("--signal", synth_opt.signal, "lamp or none")
        ->check(CLI::IsMember({"lamp", "none"}));
    synth->add_option("--freq", synth_opt.lamp.frequency,
                      "lamp signal frequency (Hz)");
    synth->add_option("--periods", synth_opt.lamp.periods,
                      "number of signal periods");
    synth->add_option("--events-per-burst", synth_opt.lamp.events_per_burst,
                      "events per burst and polarity");
    synth->add_option("--burst-width-us", synth_opt.lamp.burst_width,
                      "burst duration (us)");
    synth->add_option("--roi-x", synth_opt.lamp.roi_center.x,
                      "burst ROI center column");
    synth->add_option("--roi-y", synth_opt.lamp.roi_center.y,
                      "burst ROI center row");
    synth->add_option("--roi-radius", synth_opt.lamp.roi_radius,
                      "burst ROI Chebyshev radius");
    synth->add_option("--width", synth_opt.lamp.geometry.width,
                      "sensor width");
    synth->add_option("--height", synth_opt.lamp.geometry.height,
                      "sensor height");
    synth->add_option("--hot-pixel", synth_opt.hot_pixels,
                      "hot pixel as X,Y,RATE_HZ (repeatable)");
    synth->add_option("--background-rate", synth_opt.background_rate,
                      "background noise rate (events/s/pixel)");
    synth->add_option("--duration-us", synth_opt.duration,
                      "noise duration (default: the lamp span)");
    synth->add_option("--seed", synth_opt.seed, "generator seed");
    synth->add_option("--out", synth_opt.out, "output event file")->required();
    synth->add_option("--format", synth_opt.format,
                      "output format: csv or evc1 (default: by extension)")
        ->check(CLI::IsMember({"csv", "evc1"}));

    VerifyOptions verify_opt;
    CLI::App* verify = app.add_subcommand(
        "verify", "diff the streaming detector against the brute-force oracle");
    add_input_flags(verify, verify_opt.in);
    add_param_flags(verify, verify_opt.params);
    verify->add_flag("--allow-pixel-count-divergence",
                     verify_opt.allow_pixel_count_divergence,
                     "tolerate pixel-count-only mismatches");

    BenchOptions bench_opt;
    CLI::App* bench = app.add_subcommand(
        "bench", "measure per-event cost across stream lengths and geometries");
    bench->add_option("--events", bench_opt.events,
                      "stream lengths to sweep");
    bench->add_option("--geometry", bench_opt.geometries,
                      "geometries to sweep, as WxH");
    bench->add_option("--repeat", bench_opt.repeat,
                      "timed repetitions per cell (median is reported)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_opt.seed, "stream generator seed");
    add_param_flags(bench, bench_opt.params);

    PlotOptions plot_opt;
    CLI::App* plot = app.add_subcommand(
        "plot-data", "export t,x,y,p,is_root rows for 3-D scatter tools");
    add_input_flags(plot, plot_opt.in);
    add_param_flags(plot, plot_opt.params);
    plot->add_option("--roi", plot_opt.roi,
                     "only export events inside X0,Y0,X1,Y1");
    plot->add_option("--out", plot_opt.out,
                     "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        // Flag-level validation of geometry and parameters.
        try {
            if (cluster->parsed()) {
                SensorGeometry{cluster_opt.in.width, cluster_opt.in.height}
                    .validate();
                cluster_opt.params.params().validate();
            }
            if (verify->parsed()) {
                SensorGeometry{verify_opt.in.width, verify_opt.in.height}
                    .validate();
                verify_opt.params.params().validate();
            }
            if (plot->parsed()) {
                SensorGeometry{plot_opt.in.width, plot_opt.in.height}
                    .validate();
                plot_opt.params.params().validate();
            }
            if (bench->parsed()) bench_opt.params.params().validate();
            if (synth->parsed()) {
                LampConfig lamp = synth_opt.lamp;
                lamp.seed = synth_opt.seed;
                if (synth_opt.signal == "lamp") lamp.validate();
                else lamp.geometry.validate();
            }
        } catch (const Error& e) {
            std::cerr << "evclust: " << e.what() << "\n";
            return kExitUsage;
        }

        if (cluster->parsed()) return run_cluster(cluster_opt);
        if (synth->parsed()) return run_synth(synth_opt);
        if (verify->parsed()) return run_verify(verify_opt);
        if (bench->parsed()) return run_bench(bench_opt);
        if (plot->parsed()) return run_plot_data(plot_opt);
    } catch (const StreamError& e) {
        std::cerr << "evclust: " << e.what() << "\n";
        return kExitInput;
    } catch (const ParseError& e) {
        std::cerr << "evclust: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "evclust: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "evclust: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
