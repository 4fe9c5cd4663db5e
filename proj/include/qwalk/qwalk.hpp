#pragma once

// Everything except the HTTP binding (qwalk/http.hpp), which pulls in httplib.

#include "qwalk/constants.hpp"
#include "qwalk/ensemble.hpp"
#include "qwalk/games.hpp"
#include "qwalk/gcd.hpp"
#include "qwalk/heatmap.hpp"
#include "qwalk/links.hpp"
#include "qwalk/measurement.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/random.hpp"
#include "qwalk/service.hpp"
#include "qwalk/spinor.hpp"
#include "qwalk/verify.hpp"
#include "qwalk/walk.hpp"
