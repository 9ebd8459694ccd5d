#include "tgfl/report.hpp"
