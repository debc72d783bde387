// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace beampred {

/// Base class for failures that the command-line front end maps to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: unknown key, malformed value, missing config file. Exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad input data: CSV schema violations, shape mismatches, missing data files. Exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or parameters during training. Exit code 4.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace beampred
