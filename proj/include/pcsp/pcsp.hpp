#pragma once

#include "pcsp/affine.hpp"
#include "pcsp/analysis.hpp"
#include "pcsp/catalog.hpp"
#include "pcsp/classifier.hpp"
#include "pcsp/common.hpp"
#include "pcsp/derivation.hpp"
#include "pcsp/factored.hpp"
#include "pcsp/hom_search.hpp"
#include "pcsp/linear.hpp"
#include "pcsp/polymorphism.hpp"
#include "pcsp/rational.hpp"
#include "pcsp/relaxations.hpp"
#include "pcsp/structure.hpp"
#include "pcsp/zmodule.hpp"
