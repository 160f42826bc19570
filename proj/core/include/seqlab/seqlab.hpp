#pragma once

#include "seqlab/annotation.hpp"
#include "seqlab/automaton.hpp"
#include "seqlab/decoder.hpp"
#include "seqlab/metrics.hpp"
#include "seqlab/pretrain.hpp"
#include "seqlab/schema.hpp"
#include "seqlab/scorers.hpp"
#include "seqlab/taskio.hpp"
#include "seqlab/tokenizer.hpp"
#include "seqlab/types.hpp"
