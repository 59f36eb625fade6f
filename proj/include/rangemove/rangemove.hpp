#ifndef RANGEMOVE_RANGEMOVE_HPP
#define RANGEMOVE_RANGEMOVE_HPP

#include "rangemove/binary_cut.hpp"
#include "rangemove/dimacs.hpp"
#include "rangemove/energy.hpp"
#include "rangemove/error.hpp"
#include "rangemove/instance_io.hpp"
#include "rangemove/ishikawa.hpp"
#include "rangemove/maxflow.hpp"
#include "rangemove/moves.hpp"
#include "rangemove/oracle.hpp"
#include "rangemove/prior.hpp"
#include "rangemove/stereo.hpp"
#include "rangemove/synthetic.hpp"

#endif // RANGEMOVE_RANGEMOVE_HPP
