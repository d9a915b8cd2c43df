#pragma once

#include "ecue/error.hpp"
#include "ecue/binary_io.hpp"
#include "ecue/corpus.hpp"
#include "ecue/knowledge.hpp"
#include "ecue/kwrt.hpp"
#include "ecue/nn/tensor.hpp"
#include "ecue/nn/random.hpp"
#include "ecue/nn/ops.hpp"
#include "ecue/nn/layers.hpp"
#include "ecue/nn/adam.hpp"
#include "ecue/nn/grad_check.hpp"
#include "ecue/nn/checkpoint.hpp"
#include "ecue/audio/wav.hpp"
#include "ecue/audio/mel.hpp"
#include "ecue/audio/prosody.hpp"
#include "ecue/audio/enhance.hpp"
#include "ecue/audio/featurize.hpp"
#include "ecue/fusion.hpp"
#include "ecue/tasks/config.hpp"
#include "ecue/tasks/metrics.hpp"
#include "ecue/tasks/features.hpp"
#include "ecue/tasks/dataset.hpp"
#include "ecue/tasks/model.hpp"
#include "ecue/tasks/train.hpp"
#include "ecue/tasks/ablation.hpp"
#include "ecue/tasks/synthetic.hpp"
#include "ecue/tasks/gradient_suite.hpp"
