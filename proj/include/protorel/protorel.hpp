#pragma once

#include "protorel/error.hpp"
#include "protorel/fluent.hpp"
#include "protorel/taxonomy.hpp"
#include "protorel/protocol.hpp"
#include "protorel/derivation.hpp"
#include "protorel/branching.hpp"
#include "protorel/assignment.hpp"
#include "protorel/comparison.hpp"
#include "protorel/relations.hpp"
#include "protorel/registry.hpp"
