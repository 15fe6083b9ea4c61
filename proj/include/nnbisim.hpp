#pragma once

#include "nnbisim/error.hpp"
#include "nnbisim/interval.hpp"
#include "nnbisim/io.hpp"
#include "nnbisim/json_io.hpp"
#include "nnbisim/lp.hpp"
#include "nnbisim/merge.hpp"
#include "nnbisim/metric.hpp"
#include "nnbisim/network.hpp"
#include "nnbisim/nnet.hpp"
#include "nnbisim/norm.hpp"
#include "nnbisim/report.hpp"
#include "nnbisim/star.hpp"
#include "nnbisim/verify.hpp"
