#pragma once

#include "twisted/error.hpp"
#include "twisted/numeric.hpp"
#include "twisted/classical.hpp"
#include "twisted/twisted_functions.hpp"
#include "twisted/fermion.hpp"
#include "twisted/identity_suite.hpp"
#include "twisted/report_io.hpp"
