#pragma once

#include "trajkit/errors.hpp"
#include "trajkit/geo.hpp"
#include "trajkit/profile.hpp"
#include "trajkit/records.hpp"
#include "trajkit/relations.hpp"
#include "trajkit/segmentation.hpp"
#include "trajkit/state_machine.hpp"
#include "trajkit/store.hpp"
#include "trajkit/time.hpp"
#include "trajkit/trajectory.hpp"
