/* main.c: command-line driver for the tracer demo fixture. */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "bitmap.h"
#include "input-tga.h"

static void
usage(const char *prog)
{
    fprintf(stderr, "usage: %s [options] <input.tga> <output>\n", prog);
    fprintf(stderr, "  -o FILE   write the fitted splines to FILE\n");
    exit(2);
}

int
main(int argc, char *argv[])
{
    bitmap_type image;

    if (argc < 2)
        usage(argv[0]);

    image = input_tga_reader(argv[1]);
    printf("traced %s: %ux%u\n", argv[1], image.width, image.height);
    return 0;
}
