#pragma once
// Everything.

#include "ainfty.hpp"
#include "cc2.hpp"
#include "dga.hpp"
#include "graded.hpp"
#include "homology.hpp"
#include "io.hpp"
#include "morse.hpp"
#include "numeric_io.hpp"
#include "parallel.hpp"
#include "profile.hpp"
#include "signs.hpp"
#include "strip.hpp"
