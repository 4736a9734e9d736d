#pragma once

#include "votelab/exact.hpp"
#include "votelab/profile.hpp"
#include "votelab/rules.hpp"
#include "votelab/criteria.hpp"
#include "votelab/search.hpp"
#include "votelab/io.hpp"
