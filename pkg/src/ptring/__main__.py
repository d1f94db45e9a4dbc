from ptring.cli import main

raise SystemExit(main())
