#pragma once

#include "gillab/rational.hpp"
#include "gillab/interval_set.hpp"
#include "gillab/address.hpp"
#include "gillab/cantor.hpp"
#include "gillab/family.hpp"
#include "gillab/bonding_map.hpp"
#include "gillab/report.hpp"
#include "gillab/dynamics.hpp"
#include "gillab/inverse_limit.hpp"
#include "gillab/checks.hpp"
#include "gillab/export.hpp"
