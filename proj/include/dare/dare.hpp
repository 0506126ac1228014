#pragma once

#include "dare/afpi.hpp"
#include "dare/analysis.hpp"
#include "dare/errors.hpp"
#include "dare/matrix_core.hpp"
#include "dare/problems.hpp"
#include "dare/random.hpp"
#include "dare/rates.hpp"
#include "dare/riccati.hpp"
#include "dare/stein.hpp"
