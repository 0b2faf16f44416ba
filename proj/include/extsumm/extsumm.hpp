#pragma once

#include "extsumm/analysis.hpp"
#include "extsumm/corpus.hpp"
#include "extsumm/csv.hpp"
#include "extsumm/document.hpp"
#include "extsumm/errors.hpp"
#include "extsumm/inference.hpp"
#include "extsumm/model.hpp"
#include "extsumm/oracle.hpp"
#include "extsumm/parallel.hpp"
#include "extsumm/rouge.hpp"
#include "extsumm/run_config.hpp"
#include "extsumm/section.hpp"
#include "extsumm/svg_plot.hpp"
#include "extsumm/synthetic.hpp"
#include "extsumm/tokenize.hpp"
#include "extsumm/trainer.hpp"
#include "extsumm/vocab.hpp"
