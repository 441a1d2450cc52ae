#pragma once

#include "talespin/term.hpp"
#include "talespin/syntax.hpp"
#include "talespin/kb.hpp"
#include "talespin/kb_parser.hpp"
#include "talespin/validate.hpp"
#include "talespin/planner.hpp"
#include "talespin/rng.hpp"
#include "talespin/simulator.hpp"
#include "talespin/narrate.hpp"
#include "talespin/grammar.hpp"
#include "talespin/search.hpp"
#include "talespin/trace_json.hpp"
