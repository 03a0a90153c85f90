#pragma once

#include "pcorr/asymfit.hpp"
#include "pcorr/blowup.hpp"
#include "pcorr/constants.hpp"
#include "pcorr/dag.hpp"
#include "pcorr/error.hpp"
#include "pcorr/graph_model.hpp"
#include "pcorr/io.hpp"
#include "pcorr/pipeline.hpp"
#include "pcorr/poly.hpp"
#include "pcorr/reproduce.hpp"
#include "pcorr/rlct.hpp"
#include "pcorr/singular.hpp"
#include "pcorr/volume.hpp"
