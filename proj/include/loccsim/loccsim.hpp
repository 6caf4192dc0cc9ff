#pragma once

// Umbrella header: the whole library in dependency order.

#include "loccsim/layout.hpp"
#include "loccsim/ket.hpp"
#include "loccsim/operators.hpp"
#include "loccsim/schmidt.hpp"
#include "loccsim/catalog.hpp"
#include "loccsim/walgate.hpp"
#include "loccsim/protocol.hpp"
#include "loccsim/builtins.hpp"
#include "loccsim/upb.hpp"
#include "loccsim/serialize.hpp"
#include "loccsim/reports.hpp"
