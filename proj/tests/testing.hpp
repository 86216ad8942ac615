#pragma once

// torch's logging header defines its own CHECK; load it first and let doctest win.
#include <torch/torch.h>
#undef CHECK

#include <doctest.h>
