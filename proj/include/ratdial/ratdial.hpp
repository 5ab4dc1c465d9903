#pragma once

#include "ratdial/engine.hpp"
#include "ratdial/error.hpp"
#include "ratdial/framework.hpp"
#include "ratdial/matrix_io.hpp"
#include "ratdial/rational.hpp"
#include "ratdial/rationalize.hpp"
#include "ratdial/testkit.hpp"
