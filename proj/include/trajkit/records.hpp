#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajkit/errors.hpp"
#include "trajkit/time.hpp"

namespace trajkit {

enum class staff_role { doctor, nurse, driver, manager };

inline const char* to_string(staff_role r) {
    switch (r) {
        case staff_role::doctor: return "Doctor";
        case staff_role::nurse: return "Nurse";
        case staff_role::driver: return "Driver";
        case staff_role::manager: return "Manager";
    }
    return "?";
}

inline std::optional<staff_role> parse_staff_role(std::string_view s) {
    for (auto v : {staff_role::doctor, staff_role::nurse, staff_role::driver, staff_role::manager}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

struct staff_member {
    staff_member(std::string staff_id, staff_role role, std::string name,
                 std::optional<std::string> pda_id = std::nullopt)
        : staff_id(std::move(staff_id)), role(role), name(std::move(name)), pda_id(std::move(pda_id)) {
        if ((role == staff_role::manager || role == staff_role::doctor) && !this->pda_id) {
            throw value_error("staff '" + this->staff_id + "': managers and doctors carry a PDA");
        }
    }

    std::string staff_id;
    staff_role role;
    std::string name;
    std::optional<std::string> pda_id;

    friend bool operator==(const staff_member&, const staff_member&) = default;
};

struct record_entry {
    timestamp at;
    std::string author_id;
    std::string text;

    friend bool operator==(const record_entry&, const record_entry&) = default;
};

struct patient_record {
    std::string patient_id;
    std::string name;
    std::map<std::string, std::string> demographics;
    std::vector<record_entry> prescriptions; // append-only, timestamps non-decreasing
    std::vector<record_entry> examinations;  // same discipline

    friend bool operator==(const patient_record&, const patient_record&) = default;
};

/// In-memory patient record store. Writes are serialized; reads share a lock.
class record_store {
public:
    record_store() = default;
    record_store(record_store&& other) noexcept {
        std::unique_lock lock(other.mu_);
        patients_ = std::move(other.patients_);
        staff_ = std::move(other.staff_);
        next_id_ = other.next_id_;
    }
    record_store& operator=(record_store&& other) noexcept {
        if (this != &other) {
            std::scoped_lock lock(mu_, other.mu_);
            patients_ = std::move(other.patients_);
            staff_ = std::move(other.staff_);
            next_id_ = other.next_id_;
        }
        return *this;
    }

    std::string add_patient(std::string name, std::map<std::string, std::string> demographics) {
        std::unique_lock lock(mu_);
        std::string id = format_patient_id(next_id_++);
        patients_.emplace(id, patient_record{id, std::move(name), std::move(demographics), {}, {}});
        return id;
    }

    /// Exact-match lookup by name. Absence is a modeled outcome, not an error;
    /// several patients sharing the name is.
    std::optional<patient_record> consult_patient(std::string_view name) const {
        std::shared_lock lock(mu_);
        const patient_record* found = nullptr;
        for (const auto& [id, rec] : patients_) {
            if (rec.name == name) {
                if (found) {
                    throw ambiguous_name_error("several patients are named '" + std::string(name) +
                                               "'; look up by patient id");
                }
                found = &rec;
            }
        }
        if (!found) return std::nullopt;
        return *found;
    }

    std::optional<patient_record> find_patient(std::string_view patient_id) const {
        std::shared_lock lock(mu_);
        const auto it = patients_.find(std::string(patient_id));
        if (it == patients_.end()) return std::nullopt;
        return it->second;
    }

    patient_record add_prescription(const std::string& patient_id, const std::string& doctor_id,
                                    std::string text, timestamp at) {
        std::unique_lock lock(mu_);
        return append_entry(patient_id, doctor_id, std::move(text), at, {staff_role::doctor},
                            &patient_record::prescriptions);
    }

    patient_record add_examination(const std::string& patient_id, const std::string& author_id,
                                   std::string text, timestamp at) {
        std::unique_lock lock(mu_);
        return append_entry(patient_id, author_id, std::move(text), at,
                            {staff_role::doctor, staff_role::nurse}, &patient_record::examinations);
    }

    void register_staff(staff_member member) {
        std::unique_lock lock(mu_);
        staff_.insert_or_assign(member.staff_id, std::move(member));
    }

    std::optional<staff_member> find_staff(std::string_view staff_id) const {
        std::shared_lock lock(mu_);
        const auto it = staff_.find(std::string(staff_id));
        if (it == staff_.end()) return std::nullopt;
        return it->second;
    }

    std::vector<patient_record> patients() const {
        std::shared_lock lock(mu_);
        std::vector<patient_record> out;
        out.reserve(patients_.size());
        for (const auto& [id, rec] : patients_) out.push_back(rec);
        return out;
    }

    std::vector<staff_member> staff() const {
        std::shared_lock lock(mu_);
        std::vector<staff_member> out;
        out.reserve(staff_.size());
        for (const auto& [id, m] : staff_) out.push_back(m);
        return out;
    }

    std::uint64_t next_id() const {
        std::shared_lock lock(mu_);
        return next_id_;
    }

    /// Rebuilds a store from persisted state; ids must be unique.
    static record_store restore(std::vector<patient_record> patients,
                                std::vector<staff_member> staff, std::uint64_t next_id) {
        record_store s;
        for (auto& p : patients) {
            const std::string id = p.patient_id;
            if (!s.patients_.emplace(id, std::move(p)).second) {
                throw value_error("duplicate patient id '" + id + "'");
            }
        }
        for (auto& m : staff) s.register_staff(std::move(m));
        s.next_id_ = next_id;
        return s;
    }

private:
    static std::string format_patient_id(std::uint64_t n) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "P-%06llu", static_cast<unsigned long long>(n));
        return buf;
    }

    patient_record append_entry(const std::string& patient_id, const std::string& author_id,
                                std::string text, timestamp at,
                                std::initializer_list<staff_role> allowed,
                                std::vector<record_entry> patient_record::* list) {
        const auto staff_it = staff_.find(author_id);
        bool authorized = false;
        if (staff_it != staff_.end()) {
            for (auto role : allowed) authorized |= staff_it->second.role == role;
        }
        if (!authorized) {
            throw unauthorized_role_error("staff '" + author_id + "' may not write this entry");
        }
        const auto it = patients_.find(patient_id);
        if (it == patients_.end()) throw unknown_patient_error("no patient '" + patient_id + "'");
        auto& entries = it->second.*list;
        if (!entries.empty() && at < entries.back().at) {
            throw value_error("entry timestamps must be non-decreasing");
        }
        entries.push_back({at, author_id, std::move(text)});
        return it->second;
    }

    mutable std::shared_mutex mu_;
    std::map<std::string, patient_record> patients_;
    std::map<std::string, staff_member> staff_;
    std::uint64_t next_id_ = 1;
};

} // namespace trajkit
