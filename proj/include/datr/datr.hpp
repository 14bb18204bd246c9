#pragma once

#include "datr/backbone.hpp"
#include "datr/core.hpp"
#include "datr/crosscheck.hpp"
#include "datr/forward.hpp"
#include "datr/match.hpp"
#include "datr/reverse.hpp"
#include "datr/syntax.hpp"
