#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trajkit {

/// Base class of every domain error thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A value violates a type invariant (bad coordinate, non-simple ring,
/// empty interval, non-positive parameter, malformed timestamp, ...).
struct value_error : error {
    using error::error;
};

// -- trajectory construction --------------------------------------------

struct alternation_error : error {
    using error::error;
};

struct temporal_gap_error : error {
    using error::error;
};

struct empty_trajectory_error : error {
    using error::error;
};

// -- input streams -------------------------------------------------------

struct unsorted_input_error : error {
    using error::error;
};

struct mixed_object_error : error {
    using error::error;
};

struct no_stop_found_error : error {
    using error::error;
};

// -- state machine -------------------------------------------------------

struct invalid_transition_error : error {
    invalid_transition_error(std::string from_state, std::string event,
                             std::size_t event_index = npos)
        : error("invalid transition: state " + from_state + " has no edge for event " + event +
                (event_index == npos ? std::string{} : " (event index " + std::to_string(event_index) + ")")),
          from_state(std::move(from_state)),
          event(std::move(event)),
          event_index(event_index) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::string from_state;
    std::string event;
    std::size_t event_index; // npos when not raised from a replay
};

struct object_mismatch_error : error {
    using error::error;
};

// -- records -------------------------------------------------------------

struct unknown_patient_error : error {
    using error::error;
};

struct unauthorized_role_error : error {
    using error::error;
};

struct ambiguous_name_error : error {
    using error::error;
};

// -- files and parsing ----------------------------------------------------

struct schema_error : error {
    schema_error(std::size_t line, const std::string& what)
        : error("line " + std::to_string(line) + ": " + what), line(line) {}

    std::size_t line;
};

struct empty_file_error : error {
    using error::error;
};

struct workspace_error : error {
    using error::error;
};

// -- model text ------------------------------------------------------------

struct syntax_error : error {
    syntax_error(std::size_t line, std::size_t column, const std::string& what)
        : error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + what),
          line(line),
          column(column) {}

    std::size_t line;
    std::size_t column; // 1-based byte offset within the line
};

struct duplicate_id_error : error {
    duplicate_id_error(std::size_t line, const std::string& id)
        : error("line " + std::to_string(line) + ": duplicate element id '" + id + "'"),
          line(line),
          id(id) {}

    std::size_t line;
    std::string id;
};

struct unknown_element_error : error {
    unknown_element_error(std::size_t line, const std::string& id)
        : error("line " + std::to_string(line) + ": reference to undeclared element '" + id + "'"),
          line(line),
          id(id) {}

    std::size_t line;
    std::string id;
};

struct composition_cycle_error : error {
    using error::error;
};

} // namespace trajkit
