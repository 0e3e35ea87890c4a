#pragma once

#include "spec.hpp"
#include "parser.hpp"
#include "tast.hpp"
#include "elaborator.hpp"
#include "transform.hpp"
#include "semantics.hpp"
#include "ctl.hpp"
#include "classifier.hpp"
#include "prism_emit.hpp"
#include "report.hpp"
