#pragma once

#include "adapt_term.hpp"
#include "adapt_type.hpp"
#include "errors.hpp"
#include "fsub.hpp"
#include "normalize.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "subcapture.hpp"
#include "subtype.hpp"
#include "syntax.hpp"
#include "syntax_ops.hpp"
#include "typing.hpp"
