#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <json.hpp>

#include "trajkit/errors.hpp"
#include "trajkit/geo.hpp"
#include "trajkit/records.hpp"
#include "trajkit/segmentation.hpp"
#include "trajkit/state_machine.hpp"
#include "trajkit/time.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

namespace detail {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, std::size_t line) {
    double v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw schema_error(line, "malformed number '" + std::string(s) + "'");
    }
    return v;
}

inline timestamp parse_timestamp_field(std::string_view s, std::size_t line) {
    try {
        return parse_iso8601(s);
    } catch (const value_error& e) {
        throw schema_error(line, e.what());
    }
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

/// Iterates non-empty physical lines, handling CRLF, 1-based numbering.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (!line.empty()) fn(line, line_no);
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
}

} // namespace detail

// -- fix CSV ----------------------------------------------------------------

inline constexpr std::string_view fix_csv_header = "object_id,timestamp,lat,lon,device_id";

inline std::vector<gps_fix> parse_fix_csv(std::string_view text) {
    std::vector<gps_fix> out;
    bool saw_header = false;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (!saw_header) {
            if (line != fix_csv_header) {
                throw schema_error(line_no, "expected header '" + std::string(fix_csv_header) + "'");
            }
            saw_header = true;
            return;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 5) throw schema_error(line_no, "expected 5 fields");
        if (fields[0].empty()) throw schema_error(line_no, "object_id must not be empty");
        try {
            out.push_back({fields[0], detail::parse_timestamp_field(fields[1], line_no),
                           geo_point(detail::parse_double(fields[2], line_no),
                                     detail::parse_double(fields[3], line_no)),
                           fields[4]});
        } catch (const value_error& e) {
            throw schema_error(line_no, e.what());
        }
    });
    if (!saw_header) throw empty_file_error("fix CSV has no content");
    if (out.empty()) throw empty_file_error("fix CSV has no data rows");
    return out;
}

inline std::string format_fix_csv(std::span<const gps_fix> fixes) {
    std::string out{fix_csv_header};
    out += '\n';
    for (const auto& f : fixes) {
        out += f.object_id + ',' + format_iso8601(f.at) + ',' +
               detail::format_double(f.position.lat()) + ',' +
               detail::format_double(f.position.lon()) + ',' + f.device_id + '\n';
    }
    return out;
}

// -- event CSV ----------------------------------------------------------------

inline constexpr std::string_view event_csv_header = "object_id,timestamp,kind,reporter";

inline std::vector<mission_event> parse_event_csv(std::string_view text) {
    std::vector<mission_event> out;
    bool saw_header = false;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (!saw_header) {
            if (line != event_csv_header) {
                throw schema_error(line_no, "expected header '" + std::string(event_csv_header) + "'");
            }
            saw_header = true;
            return;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 4) throw schema_error(line_no, "expected 4 fields");
        if (fields[0].empty()) throw schema_error(line_no, "object_id must not be empty");
        const auto kind = parse_event_kind(fields[2]);
        if (!kind) throw schema_error(line_no, "unknown event kind '" + fields[2] + "'");
        out.push_back(
            {fields[0], detail::parse_timestamp_field(fields[1], line_no), *kind, fields[3]});
    });
    if (!saw_header) throw empty_file_error("event CSV has no content");
    if (out.empty()) throw empty_file_error("event CSV has no data rows");
    return out;
}

inline std::string format_event_csv(std::span<const mission_event> events) {
    std::string out{event_csv_header};
    out += '\n';
    for (const auto& e : events) {
        out += e.object_id + ',' + format_iso8601(e.at) + ',' + to_string(e.kind) + ',' +
               e.reporter + '\n';
    }
    return out;
}

// -- region file ---------------------------------------------------------------

/// One region per line: `id lat,lon;lat,lon;...`. `#` starts a comment line.
inline std::vector<region> parse_region_file(std::string_view text) {
    std::vector<region> out;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (line.front() == '#') return;
        const std::size_t space = line.find(' ');
        if (space == std::string_view::npos || space == 0) {
            throw schema_error(line_no, "expected 'id lat,lon;lat,lon;...'");
        }
        const std::string id(line.substr(0, space));
        std::vector<geo_point> ring;
        std::string_view rest = line.substr(space + 1);
        while (!rest.empty()) {
            const std::size_t semi = rest.find(';');
            const std::string_view pair =
                semi == std::string_view::npos ? rest : rest.substr(0, semi);
            const std::size_t comma = pair.find(',');
            if (comma == std::string_view::npos) {
                throw schema_error(line_no, "expected 'lat,lon' vertex");
            }
            try {
                ring.emplace_back(detail::parse_double(pair.substr(0, comma), line_no),
                                  detail::parse_double(pair.substr(comma + 1), line_no));
            } catch (const value_error& e) {
                throw schema_error(line_no, e.what());
            }
            if (semi == std::string_view::npos) break;
            rest = rest.substr(semi + 1);
        }
        try {
            out.emplace_back(id, std::move(ring));
        } catch (const value_error& e) {
            throw schema_error(line_no, e.what());
        }
    });
    if (out.empty()) throw empty_file_error("region file has no regions");
    return out;
}

inline std::string format_region_file(std::span<const region> regions) {
    std::string out;
    for (const auto& r : regions) {
        out += r.id() + ' ';
        for (std::size_t i = 0; i < r.ring().size(); ++i) {
            if (i > 0) out += ';';
            out += detail::format_double(r.ring()[i].lat()) + ',' +
                   detail::format_double(r.ring()[i].lon());
        }
        out += '\n';
    }
    return out;
}

// -- trajectory document ---------------------------------------------------------

struct trajectory_provenance {
    segmentation_params params;
    std::vector<std::string> source_files;
    std::size_t trimmed_head = 0;
    std::size_t trimmed_tail = 0;
    std::vector<anomaly> anomalies;

    friend bool operator==(const trajectory_provenance& a, const trajectory_provenance& b) {
        return a.params.stop_radius_m == b.params.stop_radius_m &&
               a.params.min_dwell == b.params.min_dwell &&
               a.params.max_fix_gap == b.params.max_fix_gap && a.source_files == b.source_files &&
               a.trimmed_head == b.trimmed_head && a.trimmed_tail == b.trimmed_tail &&
               a.anomalies == b.anomalies;
    }
};

struct trajectory_document {
    trajectory traj;
    trajectory_provenance provenance;

    friend bool operator==(const trajectory_document&, const trajectory_document&) = default;
};

inline constexpr int trajectory_schema_version = 1;

inline std::string trajectory_to_json(const trajectory_document& doc) {
    nlohmann::ordered_json j;
    j["schema_version"] = trajectory_schema_version;
    j["id"] = doc.traj.id();
    j["object_id"] = doc.traj.object_id();
    j["begin"] = format_iso8601(doc.traj.begin_time());
    j["end"] = format_iso8601(doc.traj.end_time());
    j["duration_s"] = doc.traj.total_duration().count();
    j["stops"] = nlohmann::ordered_json::array();
    for (const auto& s : doc.traj.stops()) {
        j["stops"].push_back({{"id", s.id},
                              {"begin", format_iso8601(s.begin)},
                              {"end", format_iso8601(s.end)},
                              {"lat", s.position.lat()},
                              {"lon", s.position.lon()},
                              {"source", to_string(s.source)}});
    }
    j["moves"] = nlohmann::ordered_json::array();
    for (const auto& m : doc.traj.moves()) {
        nlohmann::ordered_json path = nlohmann::ordered_json::array();
        for (const auto& p : m.path) {
            path.push_back({format_iso8601(p.at), p.position.lat(), p.position.lon()});
        }
        j["moves"].push_back({{"id", m.id},
                              {"begin", format_iso8601(m.begin)},
                              {"end", format_iso8601(m.end)},
                              {"begin_lat", m.begin_position.lat()},
                              {"begin_lon", m.begin_position.lon()},
                              {"end_lat", m.end_position.lat()},
                              {"end_lon", m.end_position.lon()},
                              {"path", std::move(path)}});
    }
    j["provenance"] = {{"stop_radius_m", doc.provenance.params.stop_radius_m},
                       {"min_dwell_s", doc.provenance.params.min_dwell.count()},
                       {"max_fix_gap_s", doc.provenance.params.max_fix_gap.count()},
                       {"source_files", doc.provenance.source_files},
                       {"trimmed_head", doc.provenance.trimmed_head},
                       {"trimmed_tail", doc.provenance.trimmed_tail}};
    j["provenance"]["anomalies"] = nlohmann::ordered_json::array();
    for (const auto& a : doc.provenance.anomalies) {
        j["provenance"]["anomalies"].push_back(
            {{"kind", to_string(a.kind)}, {"at", format_iso8601(a.at)}});
    }
    return j.dump(2) + "\n";
}

/// Deserializes and fully revalidates: stops/moves pass their constructors,
/// the assembly passes build_trajectory, and the redundant begin/end/duration
/// fields must match the recomputed ones.
inline trajectory_document trajectory_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw value_error(std::string("malformed trajectory document: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != trajectory_schema_version) {
            throw value_error("unsupported trajectory schema_version");
        }
        const std::string object_id = j.at("object_id").get<std::string>();
        std::vector<stop> stops;
        for (const auto& js : j.at("stops")) {
            const std::string source_s = js.at("source").get<std::string>();
            if (source_s != "detected" && source_s != "declared") {
                throw value_error("unknown stop source '" + source_s + "'");
            }
            stops.emplace_back(js.at("id").get<std::string>(), object_id,
                               parse_iso8601(js.at("begin").get<std::string>()),
                               parse_iso8601(js.at("end").get<std::string>()),
                               geo_point(js.at("lat").get<double>(), js.at("lon").get<double>()),
                               source_s == "detected" ? stop_source::detected
                                                      : stop_source::declared);
        }
        std::vector<move> moves;
        for (const auto& jm : j.at("moves")) {
            std::vector<path_sample> path;
            for (const auto& jp : jm.at("path")) {
                path.push_back({parse_iso8601(jp.at(0).get<std::string>()),
                                geo_point(jp.at(1).get<double>(), jp.at(2).get<double>())});
            }
            moves.emplace_back(jm.at("id").get<std::string>(), object_id,
                               parse_iso8601(jm.at("begin").get<std::string>()),
                               parse_iso8601(jm.at("end").get<std::string>()),
                               geo_point(jm.at("begin_lat").get<double>(),
                                         jm.at("begin_lon").get<double>()),
                               geo_point(jm.at("end_lat").get<double>(),
                                         jm.at("end_lon").get<double>()),
                               std::move(path));
        }
        trajectory traj = build_trajectory(object_id, std::move(stops), std::move(moves),
                                           j.at("id").get<std::string>());
        if (parse_iso8601(j.at("begin").get<std::string>()) != traj.begin_time() ||
            parse_iso8601(j.at("end").get<std::string>()) != traj.end_time() ||
            duration{j.at("duration_s").get<std::int64_t>()} != traj.total_duration()) {
            throw value_error("trajectory document begin/end/duration are inconsistent");
        }

        const auto& jp = j.at("provenance");
        trajectory_provenance prov;
        prov.params.stop_radius_m = jp.at("stop_radius_m").get<double>();
        prov.params.min_dwell = duration{jp.at("min_dwell_s").get<std::int64_t>()};
        prov.params.max_fix_gap = duration{jp.at("max_fix_gap_s").get<std::int64_t>()};
        prov.source_files = jp.at("source_files").get<std::vector<std::string>>();
        prov.trimmed_head = jp.at("trimmed_head").get<std::size_t>();
        prov.trimmed_tail = jp.at("trimmed_tail").get<std::size_t>();
        for (const auto& ja : jp.at("anomalies")) {
            const std::string kind_s = ja.at("kind").get<std::string>();
            anomaly_kind kind;
            if (kind_s == "out_of_order") {
                kind = anomaly_kind::out_of_order;
            } else if (kind_s == "duplicate_timestamp") {
                kind = anomaly_kind::duplicate_timestamp;
            } else if (kind_s == "gap") {
                kind = anomaly_kind::gap;
            } else {
                throw value_error("unknown anomaly kind '" + kind_s + "'");
            }
            prov.anomalies.push_back({kind, parse_iso8601(ja.at("at").get<std::string>())});
        }
        return {std::move(traj), std::move(prov)};
    } catch (const nlohmann::json::exception& e) {
        throw value_error(std::string("malformed trajectory document: ") + e.what());
    }
}

// -- records persistence -----------------------------------------------------

/// Line-delimited store: a header object, then one patient record per line.
inline std::string records_to_jsonl(const record_store& store) {
    std::string out;
    {
        nlohmann::ordered_json header;
        header["schema_version"] = 1;
        header["next_id"] = store.next_id();
        out += header.dump() + "\n";
    }
    for (const auto& p : store.patients()) {
        nlohmann::ordered_json j;
        j["patient_id"] = p.patient_id;
        j["name"] = p.name;
        j["demographics"] = p.demographics;
        for (const char* key : {"prescriptions", "examinations"}) {
            const auto& entries =
                std::string_view(key) == "prescriptions" ? p.prescriptions : p.examinations;
            j[key] = nlohmann::ordered_json::array();
            for (const auto& e : entries) {
                j[key].push_back({{"at", format_iso8601(e.at)},
                                  {"author", e.author_id},
                                  {"text", e.text}});
            }
        }
        out += j.dump() + "\n";
    }
    return out;
}

inline record_store records_from_jsonl(std::string_view text,
                                       std::vector<staff_member> staff = {}) {
    std::vector<patient_record> patients;
    std::uint64_t next_id = 1;
    bool saw_header = false;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            if (!saw_header) {
                next_id = j.at("next_id").get<std::uint64_t>();
                saw_header = true;
                return;
            }
            patient_record rec;
            rec.patient_id = j.at("patient_id").get<std::string>();
            rec.name = j.at("name").get<std::string>();
            rec.demographics = j.at("demographics").get<std::map<std::string, std::string>>();
            for (const char* key : {"prescriptions", "examinations"}) {
                auto& entries = std::string_view(key) == "prescriptions" ? rec.prescriptions
                                                                         : rec.examinations;
                for (const auto& je : j.at(key)) {
                    entries.push_back({parse_iso8601(je.at("at").get<std::string>()),
                                       je.at("author").get<std::string>(),
                                       je.at("text").get<std::string>()});
                }
            }
            patients.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw schema_error(line_no, e.what());
        } catch (const value_error& e) {
            throw schema_error(line_no, e.what());
        }
    });
    return record_store::restore(std::move(patients), std::move(staff), next_id);
}

// -- staff CSV -----------------------------------------------------------------

inline constexpr std::string_view staff_csv_header = "staff_id,role,name,pda_id";

inline std::vector<staff_member> parse_staff_csv(std::string_view text) {
    std::vector<staff_member> out;
    bool saw_header = false;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (!saw_header) {
            if (line != staff_csv_header) {
                throw schema_error(line_no, "expected header '" + std::string(staff_csv_header) + "'");
            }
            saw_header = true;
            return;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 4) throw schema_error(line_no, "expected 4 fields");
        const auto role = parse_staff_role(fields[1]);
        if (!role) throw schema_error(line_no, "unknown role '" + fields[1] + "'");
        try {
            out.emplace_back(fields[0], *role, fields[2],
                             fields[3].empty() ? std::nullopt
                                               : std::make_optional(fields[3]));
        } catch (const value_error& e) {
            throw schema_error(line_no, e.what());
        }
    });
    return out;
}

// -- filesystem -------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw workspace_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

/// Write-temp-then-rename; the target is either untouched or fully replaced.
/// `before_rename` exists so tests can inject a failure between the phases.
inline void write_atomic(const std::filesystem::path& target, std::string_view content,
                         const std::function<void()>& before_rename = {}) {
    const std::filesystem::path tmp = target.string() + ".tmp";
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw workspace_error("cannot create " + tmp.string());
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.flush();
            if (!out) throw workspace_error("short write to " + tmp.string());
        }
        if (before_rename) before_rename();
        std::filesystem::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

// -- workspace ---------------------------------------------------------------------

/// Plain-file workspace rooted at a directory with one subdirectory per
/// document kind. A CLI invocation holds the flock-based lock while writing.
class workspace {
public:
    explicit workspace(std::filesystem::path root) : root_(std::move(root)) {}

    static workspace init(const std::filesystem::path& root) {
        workspace ws(root);
        std::filesystem::create_directories(root);
        for (const char* dir : subdirs()) std::filesystem::create_directories(root / dir);
        return ws;
    }

    bool initialized() const {
        for (const char* dir : subdirs()) {
            if (!std::filesystem::is_directory(root_ / dir)) return false;
        }
        return true;
    }

    void require_initialized() const {
        if (!initialized()) {
            throw workspace_error("workspace at '" + root_.string() +
                                  "' is not initialized (run init)");
        }
    }

    const std::filesystem::path& root() const { return root_; }

    class scoped_lock {
    public:
        explicit scoped_lock(const workspace& ws) {
            const std::filesystem::path p = ws.root() / ".lock";
            fd_ = ::open(p.c_str(), O_CREAT | O_RDWR, 0644);
            if (fd_ < 0) throw workspace_error("cannot open lock file " + p.string());
            if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
                ::close(fd_);
                throw workspace_error("workspace is locked by another process");
            }
        }
        scoped_lock(const scoped_lock&) = delete;
        scoped_lock& operator=(const scoped_lock&) = delete;
        ~scoped_lock() {
            if (fd_ >= 0) {
                ::flock(fd_, LOCK_UN);
                ::close(fd_);
            }
        }

    private:
        int fd_ = -1;
    };

    // -- fixes --

    struct fix_ingest_result {
        std::size_t count = 0;
        std::vector<std::string> objects;
        std::map<std::string, std::vector<anomaly>> anomalies;
    };

    fix_ingest_result ingest_fixes(const std::filesystem::path& csv,
                                   duration max_fix_gap = segmentation_params{}.max_fix_gap) {
        require_initialized();
        const auto fixes = parse_fix_csv(read_file(csv));
        std::map<std::string, std::vector<gps_fix>> by_object;
        for (const auto& f : fixes) by_object[f.object_id].push_back(f);

        fix_ingest_result result;
        result.count = fixes.size();
        for (auto& [object_id, group] : by_object) {
            auto anomalies = validate_fix_stream(group, max_fix_gap);
            std::stable_sort(group.begin(), group.end(),
                             [](const gps_fix& a, const gps_fix& b) { return a.at < b.at; });
            write_atomic(root_ / "fixes" / (object_id + ".csv"), format_fix_csv(group));
            result.objects.push_back(object_id);
            if (!anomalies.empty()) result.anomalies.emplace(object_id, std::move(anomalies));
        }
        return result;
    }

    std::vector<gps_fix> load_fixes(const std::string& object_id) const {
        const auto p = root_ / "fixes" / (object_id + ".csv");
        if (!std::filesystem::exists(p)) {
            throw workspace_error("no fixes ingested for object '" + object_id + "'");
        }
        return parse_fix_csv(read_file(p));
    }

    // -- events --

    struct event_ingest_result {
        std::size_t count = 0;
        std::vector<std::string> objects;
    };

    event_ingest_result ingest_events(const std::filesystem::path& csv) {
        require_initialized();
        const auto events = parse_event_csv(read_file(csv));
        std::map<std::string, std::vector<mission_event>> by_object;
        for (const auto& e : events) by_object[e.object_id].push_back(e);

        event_ingest_result result;
        result.count = events.size();
        for (auto& [object_id, group] : by_object) {
            std::stable_sort(group.begin(), group.end(), [](const auto& a, const auto& b) {
                return a.at < b.at;
            });
            write_atomic(root_ / "events" / (object_id + ".csv"), format_event_csv(group));
            result.objects.push_back(object_id);
        }
        return result;
    }

    /// Events are optional input to segmentation; absence is an empty stream.
    std::vector<mission_event> load_events(const std::string& object_id) const {
        const auto p = root_ / "events" / (object_id + ".csv");
        if (!std::filesystem::exists(p)) return {};
        return parse_event_csv(read_file(p));
    }

    // -- regions --

    std::size_t ingest_regions(const std::filesystem::path& file) {
        require_initialized();
        auto incoming = parse_region_file(read_file(file));
        std::map<std::string, region> merged;
        for (auto& r : load_regions_if_any()) merged.insert_or_assign(r.id(), std::move(r));
        for (auto& r : incoming) merged.insert_or_assign(r.id(), std::move(r));
        std::vector<region> all;
        all.reserve(merged.size());
        for (auto& [id, r] : merged) all.push_back(std::move(r));
        write_atomic(regions_path(), format_region_file(all));
        return incoming.size();
    }

    std::vector<region> load_regions() const {
        if (!std::filesystem::exists(regions_path())) {
            throw workspace_error("no regions ingested");
        }
        return parse_region_file(read_file(regions_path()));
    }

    region load_region(const std::string& id) const {
        for (auto& r : load_regions()) {
            if (r.id() == id) return r;
        }
        throw workspace_error("no region '" + id + "' in workspace");
    }

    // -- trajectories --

    void save_trajectory(const trajectory_document& doc) {
        require_initialized();
        write_atomic(root_ / "trajectories" / (doc.traj.object_id() + ".traj"),
                     trajectory_to_json(doc));
    }

    trajectory_document load_trajectory(const std::string& object_id) const {
        const auto p = root_ / "trajectories" / (object_id + ".traj");
        if (!std::filesystem::exists(p)) {
            throw workspace_error("no trajectory for object '" + object_id + "' (run segment)");
        }
        return trajectory_from_json(read_file(p));
    }

    // -- records --

    record_store load_records() const {
        std::vector<staff_member> staff;
        const auto staff_path = root_ / "records" / "staff.csv";
        if (std::filesystem::exists(staff_path)) staff = parse_staff_csv(read_file(staff_path));
        const auto p = root_ / "records" / "records.jsonl";
        if (!std::filesystem::exists(p)) {
            return record_store::restore({}, std::move(staff), 1);
        }
        return records_from_jsonl(read_file(p), std::move(staff));
    }

    void save_records(const record_store& store) {
        require_initialized();
        write_atomic(root_ / "records" / "records.jsonl", records_to_jsonl(store));
    }

    /// Emits one JSON file per patient under records/export/.
    std::vector<std::filesystem::path> export_records(const record_store& store) {
        require_initialized();
        const auto dir = root_ / "records" / "export";
        std::filesystem::create_directories(dir);
        std::vector<std::filesystem::path> out;
        for (const auto& p : store.patients()) {
            nlohmann::ordered_json j;
            j["patient_id"] = p.patient_id;
            j["name"] = p.name;
            j["demographics"] = p.demographics;
            j["prescriptions"] = nlohmann::ordered_json::array();
            for (const auto& e : p.prescriptions) {
                j["prescriptions"].push_back(
                    {{"at", format_iso8601(e.at)}, {"author", e.author_id}, {"text", e.text}});
            }
            j["examinations"] = nlohmann::ordered_json::array();
            for (const auto& e : p.examinations) {
                j["examinations"].push_back(
                    {{"at", format_iso8601(e.at)}, {"author", e.author_id}, {"text", e.text}});
            }
            const auto path = dir / (p.patient_id + ".json");
            write_atomic(path, j.dump(2) + "\n");
            out.push_back(path);
        }
        return out;
    }

private:
    static constexpr std::array<const char*, 6> subdirs() {
        return {"fixes", "events", "trajectories", "regions", "records", "models"};
    }

    std::filesystem::path regions_path() const { return root_ / "regions" / "regions.txt"; }

    std::vector<region> load_regions_if_any() const {
        if (!std::filesystem::exists(regions_path())) return {};
        return parse_region_file(read_file(regions_path()));
    }

    std::filesystem::path root_;
};

} // namespace trajkit
