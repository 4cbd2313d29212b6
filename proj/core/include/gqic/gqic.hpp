#ifndef GQIC_GQIC_HPP_
#define GQIC_GQIC_HPP_

#include "gqic/criteria.hpp"
#include "gqic/error.hpp"
#include "gqic/estimator.hpp"
#include "gqic/experiment.hpp"
#include "gqic/gqlf.hpp"
#include "gqic/levy.hpp"
#include "gqic/limit_dist.hpp"
#include "gqic/model.hpp"
#include "gqic/optimize.hpp"
#include "gqic/rng.hpp"
#include "gqic/sde.hpp"
#include "gqic/selection.hpp"

#endif  // GQIC_GQIC_HPP_
