#pragma once

#include "core.hpp"
#include "dataset_io.hpp"
#include "index.hpp"
#include "bounds.hpp"
#include "miner.hpp"
#include "oracle.hpp"
