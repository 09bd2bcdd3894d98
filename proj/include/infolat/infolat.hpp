#pragma once

// Everything except the oracle, validation and manifest headers, which pull in
// test-only machinery or OpenSSL.

#include "infolat/dynamics.hpp"
#include "infolat/entropy.hpp"
#include "infolat/errors.hpp"
#include "infolat/fit.hpp"
#include "infolat/gaussian.hpp"
#include "infolat/io.hpp"
#include "infolat/lattice.hpp"
#include "infolat/parallel.hpp"
#include "infolat/protocols.hpp"
#include "infolat/version.hpp"
