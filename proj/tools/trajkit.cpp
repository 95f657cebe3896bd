// trajkit: batch command line for the stop/move trajectory engine.
//
// Exit codes: 0 success, 1 domain error (diagnostics on stderr), 2 usage.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajkit/trajkit.hpp"

namespace {

namespace fs = std::filesystem;

std::string workspace_flag;

fs::path workspace_root() {
    if (!workspace_flag.empty()) return workspace_flag;
    if (const char* env = std::getenv("TRAJKIT_WORKSPACE"); env && *env) return env;
    return ".";
}

trajkit::workspace open_workspace() {
    trajkit::workspace ws{workspace_root()};
    ws.require_initialized();
    return ws;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

trajkit::transition_table load_table(const std::string& path) {
    if (path.empty()) return trajkit::transition_table::standard();
    std::ifstream in(path);
    if (!in) throw trajkit::workspace_error("cannot open transition table " + path);
    return trajkit::transition_table::parse(in);
}

trajkit::timestamp resolve_start(const std::string& flag,
                                 const std::vector<trajkit::mission_event>& events) {
    if (!flag.empty()) return trajkit::parse_iso8601(flag);
    if (events.empty()) throw trajkit::workspace_error("no events to derive a start time from");
    return events.front().at;
}

void print_timeline(const trajkit::state_timeline& tl) {
    for (const auto& e : tl.entries) {
        std::cout << to_string(e.state) << ' ' << trajkit::format_iso8601(e.begin) << ' '
                  << (e.end ? trajkit::format_iso8601(*e.end) : std::string{"-"}) << '\n';
    }
}

void cmd_init() {
    const auto ws = trajkit::workspace::init(workspace_root());
    std::cout << "initialized workspace at " << ws.root().string() << '\n';
}

void cmd_ingest_fixes(const std::string& file) {
    auto ws = open_workspace();
    trajkit::workspace::scoped_lock lock(ws);
    const auto result = ws.ingest_fixes(file);
    std::cout << "ingested " << result.count << " fixes for " << result.objects.size()
              << " object(s)\n";
    for (const auto& [object, anomalies] : result.anomalies) {
        for (const auto& a : anomalies) {
            std::cout << "anomaly " << object << ' ' << to_string(a.kind) << ' '
                      << trajkit::format_iso8601(a.at) << '\n';
        }
    }
}

void cmd_ingest_events(const std::string& file) {
    auto ws = open_workspace();
    trajkit::workspace::scoped_lock lock(ws);
    const auto result = ws.ingest_events(file);
    std::cout << "ingested " << result.count << " events for " << result.objects.size()
              << " object(s)\n";
}

void cmd_ingest_regions(const std::string& file) {
    auto ws = open_workspace();
    trajkit::workspace::scoped_lock lock(ws);
    std::cout << "ingested " << ws.ingest_regions(file) << " region(s)\n";
}

void cmd_segment(const std::string& object_id, double radius, std::int64_t dwell,
                 std::int64_t max_gap) {
    auto ws = open_workspace();
    trajkit::workspace::scoped_lock lock(ws);
    const trajkit::segmentation_params params{radius, trajkit::duration{dwell},
                                              trajkit::duration{max_gap}};
    const auto fixes = ws.load_fixes(object_id);
    const auto events = ws.load_events(object_id);
    auto report = trajkit::segment(fixes, params, events);

    trajkit::trajectory_provenance prov;
    prov.params = params;
    prov.source_files.push_back("fixes/" + object_id + ".csv");
    if (!events.empty()) prov.source_files.push_back("events/" + object_id + ".csv");
    prov.trimmed_head = report.trimmed_head;
    prov.trimmed_tail = report.trimmed_tail;
    prov.anomalies = report.anomalies;
    ws.save_trajectory({report.traj, prov});

    std::cout << "segmented " << object_id << ": " << report.traj.stops().size() << " stops, "
              << report.traj.moves().size() << " moves\n"
              << "trimmed " << report.trimmed_head << " leading, " << report.trimmed_tail
              << " trailing fixes\n"
              << "anomalies: " << report.anomalies.size() << '\n';
}

void cmd_relate(const std::string& a, const std::string& b, double near_m, double equal_tol) {
    const auto ws = open_workspace();
    trajkit::relation_params params;
    params.near_threshold_m = near_m;
    params.equal_tolerance_m = equal_tol;
    params.validate();
    const auto t1 = ws.load_trajectory(a).traj;
    const auto t2 = ws.load_trajectory(b).traj;
    const auto f1 = spatial_footprint(t1);
    const auto f2 = spatial_footprint(t2);
    std::cout << "intersects: " << yes_no(trajkit::intersects(t1, t2)) << '\n'
              << "equal: " << yes_no(trajkit::equal(t1, t2, params)) << '\n'
              << "near: " << yes_no(trajkit::near(t1, t2, params)) << '\n'
              << "far: " << yes_no(trajkit::far(t1, t2, params)) << '\n'
              << "min_distance_m: "
              << trajkit::detail::format_double(trajkit::footprint_min_distance_m(f1, f2)) << '\n'
              << "hausdorff_m: "
              << trajkit::detail::format_double(trajkit::footprint_hausdorff_m(f1, f2)) << '\n';
}

void cmd_region(const std::string& object_id, const std::string& region_id, double bypass_margin) {
    const auto ws = open_workspace();
    trajkit::relation_params params;
    params.bypass_margin_m = bypass_margin;
    params.validate();
    const auto t = ws.load_trajectory(object_id).traj;
    const auto r = ws.load_region(region_id);
    const auto rel = trajkit::region_relation(t, r, params);
    std::cout << "stay_within: " << yes_no(rel.stay_within) << '\n'
              << "bypass: " << yes_no(rel.bypass) << '\n'
              << "leave: " << yes_no(rel.leave) << '\n'
              << "enter: " << yes_no(rel.enter) << '\n'
              << "cross: " << yes_no(rel.cross) << '\n'
              << "crossings: " << rel.crossings << '\n';
}

void cmd_timeline(const std::string& object_id, const std::string& start_flag,
                  const std::string& table_file) {
    const auto ws = open_workspace();
    const auto events = ws.load_events(object_id);
    if (events.empty()) throw trajkit::workspace_error("no events ingested for '" + object_id + "'");
    const auto table = load_table(table_file);
    print_timeline(trajkit::replay(events, resolve_start(start_flag, events), table));
}

void cmd_reconcile(const std::string& object_id, std::int64_t tolerance,
                   const std::string& start_flag, const std::string& table_file) {
    const auto ws = open_workspace();
    const auto traj = ws.load_trajectory(object_id).traj;
    const auto events = ws.load_events(object_id);
    if (events.empty()) throw trajkit::workspace_error("no events ingested for '" + object_id + "'");
    const auto table = load_table(table_file);
    const auto timeline = trajkit::replay(events, resolve_start(start_flag, events), table);
    const auto issues = trajkit::reconcile(timeline, traj, trajkit::duration{tolerance});
    std::cout << issues.size() << " discrepancies\n";
    for (const auto& d : issues) {
        std::cout << (d.kind == trajkit::discrepancy_kind::stop_during_move ? "stop_during_move"
                                                                            : "move_during_stop")
                  << ' ' << d.element_id << " overlaps " << to_string(d.state) << ' '
                  << trajkit::format_iso8601(d.overlap_begin) << ".."
                  << trajkit::format_iso8601(d.overlap_end) << '\n';
    }
}

void print_patient(const trajkit::patient_record& rec) {
    std::cout << "patient " << rec.patient_id << ": " << rec.name << '\n';
    for (const auto& [k, v] : rec.demographics) std::cout << "  " << k << ": " << v << '\n';
    std::cout << "  prescriptions: " << rec.prescriptions.size() << '\n';
    for (const auto& e : rec.prescriptions) {
        std::cout << "    " << trajkit::format_iso8601(e.at) << ' ' << e.author_id << ": " << e.text
                  << '\n';
    }
    std::cout << "  examinations: " << rec.examinations.size() << '\n';
    for (const auto& e : rec.examinations) {
        std::cout << "    " << trajkit::format_iso8601(e.at) << ' ' << e.author_id << ": " << e.text
                  << '\n';
    }
}

void cmd_records_consult(const std::string& name) {
    const auto ws = open_workspace();
    const auto store = ws.load_records();
    const auto rec = store.consult_patient(name);
    if (!rec) {
        std::cout << "not found: " << name << '\n';
        return;
    }
    print_patient(*rec);
}

void cmd_records_add(const std::string& name, const std::vector<std::string>& demo_pairs) {
    auto ws = open_workspace();
    trajkit::workspace::scoped_lock lock(ws);
    std::map<std::string, std::string> demographics;
    for (const auto& pair : demo_pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw trajkit::value_error("demographics must be key=value, got '" + pair + "'");
        }
        demographics[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    auto store = ws.load_records();
    const std::string id = store.add_patient(name, std::move(demographics));
    ws.save_records(store);
    std::cout << "added patient " << id << '\n';
}

void cmd_records_prescribe(const std::string& patient_id, const std::string& doctor_id,
                           const std::string& text, const std::string& at) {
    auto ws = open_workspace();
    trajkit::workspace::scoped_lock lock(ws);
    auto store = ws.load_records();
    const auto rec = store.add_prescription(patient_id, doctor_id, text, trajkit::parse_iso8601(at));
    ws.save_records(store);
    std::cout << "prescription added to " << rec.patient_id << " (" << rec.prescriptions.size()
              << " total)\n";
}

void cmd_profile_export(const std::string& format) {
    std::cout << trajkit::export_profile(format == "table" ? trajkit::export_format::table_text
                                                           : trajkit::export_format::structured);
}

void cmd_profile_validate(const std::string& file) {
    const auto model = trajkit::parse_model(trajkit::read_file(file));
    const auto violations = trajkit::validate_model(model);
    for (const auto& v : violations) {
        std::cout << v.rule << ' ' << v.element_id << " line " << v.line << ": " << v.message
                  << '\n';
    }
    std::cout << violations.size() << " violation(s)\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trajkit: stop/move trajectory engine for mobile mission data"};
    app.require_subcommand(1);
    app.add_option("--workspace", workspace_flag,
                   "workspace root (overrides TRAJKIT_WORKSPACE; default '.')");

    app.add_subcommand("init", "create the workspace layout")->callback(cmd_init);

    auto* ingest = app.add_subcommand("ingest", "ingest raw data files");
    ingest->require_subcommand(1);
    {
        static std::string file;
        auto* fixes = ingest->add_subcommand("fixes", "ingest a GPS fix CSV");
        fixes->add_option("file", file, "CSV file")->required();
        fixes->callback([] { cmd_ingest_fixes(file); });
    }
    {
        static std::string file;
        auto* events = ingest->add_subcommand("events", "ingest a mission event CSV");
        events->add_option("file", file, "CSV file")->required();
        events->callback([] { cmd_ingest_events(file); });
    }
    {
        static std::string file;
        auto* regions = ingest->add_subcommand("regions", "ingest a region file");
        regions->add_option("file", file, "region file")->required();
        regions->callback([] { cmd_ingest_regions(file); });
    }

    {
        static std::string object_id;
        static double radius = trajkit::segmentation_params{}.stop_radius_m;
        static std::int64_t dwell = trajkit::segmentation_params{}.min_dwell.count();
        static std::int64_t max_gap = trajkit::segmentation_params{}.max_fix_gap.count();
        auto* seg = app.add_subcommand("segment", "segment an object's fixes into stops and moves");
        seg->add_option("object_id", object_id)->required();
        seg->add_option("--radius", radius, "stop radius in meters");
        seg->add_option("--dwell", dwell, "minimum dwell in seconds");
        seg->add_option("--max-gap", max_gap, "fix gap anomaly threshold in seconds");
        seg->callback([] { cmd_segment(object_id, radius, dwell, max_gap); });
    }

    {
        static std::string a, b;
        static double near_m = trajkit::relation_params{}.near_threshold_m;
        static double equal_tol = trajkit::relation_params{}.equal_tolerance_m;
        auto* relate = app.add_subcommand("relate", "trajectory-trajectory predicates");
        relate->add_option("traj1", a)->required();
        relate->add_option("traj2", b)->required();
        relate->add_option("--near", near_m, "near threshold in meters");
        relate->add_option("--equal-tol", equal_tol, "equality tolerance in meters");
        relate->callback([] { cmd_relate(a, b, near_m, equal_tol); });
    }

    {
        static std::string object_id, region_id;
        static double margin = trajkit::relation_params{}.bypass_margin_m;
        auto* reg = app.add_subcommand("region", "trajectory-region predicates");
        reg->add_option("traj", object_id)->required();
        reg->add_option("region", region_id)->required();
        reg->add_option("--bypass-margin", margin, "bypass margin in meters");
        reg->callback([] { cmd_region(object_id, region_id, margin); });
    }

    {
        static std::string object_id, start, table;
        auto* tl = app.add_subcommand("timeline", "replay the event log into a state timeline");
        tl->add_option("object_id", object_id)->required();
        tl->add_option("--start", start, "mission start (ISO-8601); default first event");
        tl->add_option("--table", table, "transition table override file");
        tl->callback([] { cmd_timeline(object_id, start, table); });
    }

    {
        static std::string object_id, start, table;
        static std::int64_t tolerance = 60;
        auto* rec = app.add_subcommand("reconcile", "cross-check timeline against trajectory");
        rec->add_option("object_id", object_id)->required();
        rec->add_option("--tolerance", tolerance, "overlap tolerance in seconds");
        rec->add_option("--start", start, "mission start (ISO-8601); default first event");
        rec->add_option("--table", table, "transition table override file");
        rec->callback([] { cmd_reconcile(object_id, tolerance, start, table); });
    }

    auto* records = app.add_subcommand("records", "patient record operations");
    records->require_subcommand(1);
    {
        static std::string name;
        auto* consult = records->add_subcommand("consult", "look up a patient by exact name");
        consult->add_option("name", name)->required();
        consult->callback([] { cmd_records_consult(name); });
    }
    {
        static std::string name;
        static std::vector<std::string> demo;
        auto* add = records->add_subcommand("add", "register a new patient");
        add->add_option("name", name)->required();
        add->add_option("--demo", demo, "demographics as key=value");
        add->callback([] { cmd_records_add(name, demo); });
    }
    {
        static std::string patient_id, doctor_id, text, at;
        auto* rx = records->add_subcommand("prescribe", "append a prescription");
        rx->add_option("patient_id", patient_id)->required();
        rx->add_option("doctor_id", doctor_id)->required();
        rx->add_option("text", text)->required();
        rx->add_option("--at", at, "prescription time (ISO-8601)")->required();
        rx->callback([] { cmd_records_prescribe(patient_id, doctor_id, text, at); });
    }

    auto* profile = app.add_subcommand("profile", "stereotype profile operations");
    profile->require_subcommand(1);
    {
        static std::string format = "structured";
        auto* exp = profile->add_subcommand("export", "emit the stereotype vocabulary");
        exp->add_option("--format", format, "structured|table")
            ->check(CLI::IsMember({"structured", "table"}));
        exp->callback([] { cmd_profile_export(format); });
    }
    {
        static std::string file;
        auto* val = profile->add_subcommand("validate", "check a model against the profile");
        val->add_option("model_file", file)->required();
        val->callback([] { cmd_profile_validate(file); });
    }

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const trajkit::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
