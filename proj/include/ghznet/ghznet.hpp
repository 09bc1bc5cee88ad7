#pragma once

#include "ghznet/errors.hpp"
#include "ghznet/statevec.hpp"
#include "ghznet/topology.hpp"
#include "ghznet/locc.hpp"
#include "ghznet/protocols.hpp"
#include "ghznet/spec_format.hpp"
#include "ghznet/report.hpp"
#include "ghznet/cli.hpp"
