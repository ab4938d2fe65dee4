#pragma once

// Everything except png.hpp, which needs libpng at link time.

#include "chyp/core.hpp"
#include "chyp/heisenberg.hpp"
#include "chyp/totally_real.hpp"
#include "chyp/fuchsian.hpp"
#include "chyp/amalgam.hpp"
#include "chyp/maskit.hpp"
#include "chyp/toledo.hpp"
#include "chyp/limitset.hpp"
#include "chyp/config.hpp"
#include "chyp/serialize.hpp"
