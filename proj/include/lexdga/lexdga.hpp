#pragma once

#include "lexdga/error.hpp"
#include "lexdga/random.hpp"
#include "lexdga/csv.hpp"
#include "lexdga/corpus.hpp"
#include "lexdga/features.hpp"
#include "lexdga/selection.hpp"
#include "lexdga/tree.hpp"
#include "lexdga/knn.hpp"
#include "lexdga/bagging.hpp"
#include "lexdga/model.hpp"
#include "lexdga/model_io.hpp"
#include "lexdga/evaluation.hpp"
#include "lexdga/synthetic.hpp"
