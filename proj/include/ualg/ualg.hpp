#ifndef UALG_UALG_HPP
#define UALG_UALG_HPP

#include "algebra.hpp"
#include "catalog.hpp"
#include "commutator.hpp"
#include "con_lattice.hpp"
#include "congruence.hpp"
#include "error.hpp"
#include "homomorphism.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "lifting.hpp"
#include "powerset.hpp"
#include "term.hpp"
#include "tuples.hpp"

#endif
