#pragma once

// Umbrella header.

#include "emgpr/biquad.hpp"
#include "emgpr/complexity.hpp"
#include "emgpr/config.hpp"
#include "emgpr/errors.hpp"
#include "emgpr/feature_csv.hpp"
#include "emgpr/features.hpp"
#include "emgpr/labels.hpp"
#include "emgpr/lda.hpp"
#include "emgpr/metrics.hpp"
#include "emgpr/model_io.hpp"
#include "emgpr/pipeline.hpp"
#include "emgpr/profile.hpp"
#include "emgpr/recording.hpp"
#include "emgpr/ring_buffer.hpp"
#include "emgpr/session.hpp"
#include "emgpr/spectral_oracle.hpp"
#include "emgpr/synth.hpp"
#include "emgpr/window.hpp"
