#pragma once

#include <stdexcept>
#include <string>

namespace klr {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text, file, or illegal parameter value.
class validation_error : public error {
 public:
  explicit validation_error(const std::string& what) : error(what) {}
};

// Operands belong to different Coxeter systems.
class mixed_system_error : public error {
 public:
  explicit mixed_system_error(const std::string& what) : error(what) {}
};

// A required table (e.g. the Langlands-dual one) has not been supplied.
class missing_data_error : public error {
 public:
  explicit missing_data_error(const std::string& what) : error(what) {}
};

// Desk-scale guard tripped; see KLR_GUARD_OFF.
class guard_error : public error {
 public:
  explicit guard_error(const std::string& what) : error(what) {}
};

}  // namespace klr
