#pragma once

#include "invnms/geometry.hpp"
#include "invnms/suppression.hpp"
#include "invnms/evaluation.hpp"
#include "invnms/dataio.hpp"
