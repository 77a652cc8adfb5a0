#pragma once

#include "lda/errors.hpp"
#include "lda/spin_model.hpp"
#include "lda/sample_set.hpp"
#include "lda/feature_hamiltonian.hpp"
#include "lda/samplers.hpp"
#include "lda/qa_sim.hpp"
#include "lda/protocols.hpp"
#include "lda/instances.hpp"
#include "lda/io.hpp"
#include "lda/bench.hpp"
