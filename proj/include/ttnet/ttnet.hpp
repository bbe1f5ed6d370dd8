#pragma once

#include "ttnet/errors.hpp"
#include "ttnet/model.hpp"
#include "ttnet/roots.hpp"
#include "ttnet/flow.hpp"
#include "ttnet/switching.hpp"
#include "ttnet/ptd.hpp"
#include "ttnet/linalg.hpp"
#include "ttnet/feedback.hpp"
#include "ttnet/smooth.hpp"
#include "ttnet/io.hpp"
