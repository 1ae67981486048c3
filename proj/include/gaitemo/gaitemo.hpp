#pragma once

#include "gaitemo/classify.hpp"
#include "gaitemo/commands.hpp"
#include "gaitemo/error.hpp"
#include "gaitemo/features.hpp"
#include "gaitemo/ingestion.hpp"
#include "gaitemo/preprocessing.hpp"
#include "gaitemo/skeleton.hpp"
#include "gaitemo/synthgait.hpp"
