/* The public header must remain valid C. */
#include "starsec.h"

const char* starsec_header_check_version(void) { return starsec_version ? "ok" : "no"; }
