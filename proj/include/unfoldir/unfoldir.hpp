#pragma once

#include "unfoldir/cg.hpp"
#include "unfoldir/config.hpp"
#include "unfoldir/diffusion.hpp"
#include "unfoldir/errors.hpp"
#include "unfoldir/gradient.hpp"
#include "unfoldir/image.hpp"
#include "unfoldir/image_io.hpp"
#include "unfoldir/linear_operator.hpp"
#include "unfoldir/metrics.hpp"
#include "unfoldir/model.hpp"
#include "unfoldir/parallel.hpp"
#include "unfoldir/pipeline.hpp"
#include "unfoldir/plane.hpp"
#include "unfoldir/smoothing.hpp"
#include "unfoldir/stage.hpp"
#include "unfoldir/trace_io.hpp"
#include "unfoldir/tuner.hpp"
#include "unfoldir/wavelet.hpp"
