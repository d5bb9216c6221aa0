#pragma once

#include <gtest/gtest.h>

#include "weaktomo/errors.hpp"
#include "weaktomo/hilbert.hpp"

// Runs `stmt` and checks it throws weaktomo::Error of the given kind.
#define EXPECT_KIND(stmt, k)                                                      \
    do {                                                                          \
        try {                                                                     \
            stmt;                                                                 \
            ADD_FAILURE() << "no exception from " #stmt;                          \
        } catch (const weaktomo::Error& e_) {                                     \
            EXPECT_EQ(e_.kind(), weaktomo::ErrorKind::k) << e_.what();            \
        }                                                                         \
    } while (0)

inline double max_abs(const weaktomo::CMat& m) { return m.cwiseAbs().maxCoeff(); }
