#pragma once

#include "affordance/config.hpp"
#include "affordance/dataset/examples.hpp"
#include "affordance/models/fusion.hpp"

namespace affordance::training {

/// Mean cross-entropy of the heads present in `layout`; the dual layout sums
/// the tool and action terms. Throws LabelError for labels outside the class
/// range and ShapeError when a head's logits are missing.
torch::Tensor loss(const models::LogitsRecord& logits, const dataset::LabelTensors& labels, HeadLayout layout);

}  // namespace affordance::training
