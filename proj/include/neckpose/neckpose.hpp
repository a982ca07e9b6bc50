#pragma once

// Everything in one include.
#include "neckpose/error.hpp"
#include "neckpose/posture.hpp"
#include "neckpose/imu.hpp"
#include "neckpose/preprocess.hpp"
#include "neckpose/kv_config.hpp"
#include "neckpose/neck_model.hpp"
#include "neckpose/kinetics.hpp"
#include "neckpose/synth.hpp"
#include "neckpose/sim_io.hpp"
#include "neckpose/ik.hpp"
#include "neckpose/forest.hpp"
#include "neckpose/evaluation.hpp"
#include "neckpose/pipeline.hpp"
